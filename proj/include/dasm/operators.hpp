#pragma once

#include <span>
#include <vector>

#include "dasm/chart.hpp"
#include "dasm/mesh.hpp"
#include "dasm/sparse.hpp"

namespace dasm {

enum class Axis { s, r };

struct DerivativeSpec {
    Axis axis = Axis::s;
    int order = 2;  ///< 1..4
};

/// One term v(x + step * delta * axis) * coefficient / delta^order.
struct StencilTap {
    int step;
    double coefficient;
};

/// Order 1 and 3 are forward differences, 2 and 4 central.
[[nodiscard]] std::vector<StencilTap> finite_difference_stencil(int order);

/// Membrane (w10, w01), twist (w11) and thin-plate (w20, w02) weights.
struct RegularizerWeights {
    double w10 = 0.0;
    double w01 = 0.0;
    double w11 = 0.0;
    double w20 = 0.0;
    double w02 = 0.0;

    /// Throws std::invalid_argument on a negative or non-finite weight.
    void validate() const;
    [[nodiscard]] bool all_zero() const { return w10 == 0 && w01 == 0 && w11 == 0 && w20 == 0 && w02 == 0; }
};

/// Row `chart.center` of a derivative operator as (vertex, weight) pairs:
/// the stencil taps combined through interpolation rows of the chart.
[[nodiscard]] std::vector<std::pair<VertexId, double>> derivative_row(const LocalChart& chart, DerivativeSpec spec);

/// N x N finite-difference operator. Vertices without a chart get an empty
/// row.
[[nodiscard]] SparseMatrix build_derivative_operator(const TriangleMesh& mesh, const ChartSet& charts,
                                                      DerivativeSpec spec, Execution exec = Execution::parallel);

/// A = -w10 Dss - w01 Drr + 2 w11 Dss Drr + w20 Dssss + w02 Drrrr, the
/// discrete Euler-Lagrange operator, applied per coordinate channel.
[[nodiscard]] SparseMatrix build_regularizer(const TriangleMesh& mesh, const ChartSet& charts,
                                             const RegularizerWeights& w, Execution exec = Execution::parallel);

/// sum_{n=0..K} (-1)^n alpha^-(n+1) A^n x, evaluated with K
/// matrix-vector products (Horner form).
[[nodiscard]] Vector neumann_apply_inverse(const SparseMatrix& a, double alpha, int k, std::span<const double> x,
                                           Execution exec = Execution::parallel);

/// Same series applied to every coordinate channel of a 3N vector.
[[nodiscard]] Vector neumann_apply_inverse3(const SparseMatrix& a, double alpha, int k, std::span<const double> phi,
                                            Execution exec = Execution::parallel);

/// Power-iteration estimate of the spectral radius of A (diagnostic only).
[[nodiscard]] double estimate_spectral_radius(const SparseMatrix& a, int iterations = 200);

}  // namespace dasm
