#include "dasm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dasm/random.hpp"

namespace dasm {

std::vector<StencilTap> finite_difference_stencil(int order) {
    switch (order) {
        case 1: return {{1, 1.0}, {0, -1.0}};
        case 2: return {{1, 1.0}, {0, -2.0}, {-1, 1.0}};
        case 3: return {{2, 1.0}, {1, -3.0}, {0, 3.0}, {-1, -1.0}};
        case 4: return {{2, 1.0}, {1, -4.0}, {0, 6.0}, {-1, -4.0}, {-2, 1.0}};
        default: throw std::invalid_argument("derivative order must be 1..4, got " + std::to_string(order));
    }
}

void RegularizerWeights::validate() const {
    for (double w : {w10, w01, w11, w20, w02}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("regularizer weights must be finite and >= 0");
    }
}

std::vector<std::pair<VertexId, double>> derivative_row(const LocalChart& chart, DerivativeSpec spec) {
    const auto taps = finite_difference_stencil(spec.order);
    const double scale = 1.0 / std::pow(chart.delta, spec.order);
    std::vector<std::pair<VertexId, double>> row;
    for (const StencilTap& tap : taps) {
        const double t = tap.step * chart.delta;
        const Vec2 offset = spec.axis == Axis::s ? Vec2{t, 0.0} : Vec2{0.0, t};
        for (const auto& [v, w] : interpolation_row(chart, offset).entries) {
            row.emplace_back(v, tap.coefficient * scale * w);
        }
    }
    return row;
}

SparseMatrix build_derivative_operator(const TriangleMesh& mesh, const ChartSet& charts, DerivativeSpec spec,
                                       Execution exec) {
    if (charts.size() != mesh.num_vertices()) {
        throw std::invalid_argument("chart set covers " + std::to_string(charts.size()) + " vertices, mesh has " +
                                    std::to_string(mesh.num_vertices()));
    }
    (void)finite_difference_stencil(spec.order);
    const auto n = static_cast<std::int32_t>(mesh.num_vertices());
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(n));
    auto fill = [&](std::int32_t i) {
        const auto& chart = charts[static_cast<std::size_t>(i)];
        if (chart) rows[static_cast<std::size_t>(i)] = derivative_row(*chart, spec);
    };
    if (exec == Execution::serial) {
        for (std::int32_t i = 0; i < n; ++i) fill(i);
    } else {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int32_t i = 0; i < n; ++i) fill(i);
    }
    return SparseMatrix::from_rows(n, std::move(rows));
}

SparseMatrix build_regularizer(const TriangleMesh& mesh, const ChartSet& charts, const RegularizerWeights& w,
                               Execution exec) {
    w.validate();
    const auto n = static_cast<std::int32_t>(mesh.num_vertices());
    if (charts.size() != mesh.num_vertices()) throw std::invalid_argument("chart set does not match mesh");
    SparseMatrix a(n, n);
    auto op = [&](Axis axis, int order) { return build_derivative_operator(mesh, charts, {axis, order}, exec); };
    if (w.w10 > 0) a = spadd(a, op(Axis::s, 2), 1.0, -w.w10);
    if (w.w01 > 0) a = spadd(a, op(Axis::r, 2), 1.0, -w.w01);
    if (w.w11 > 0) a = spadd(a, spmul(op(Axis::s, 2), op(Axis::r, 2), exec), 1.0, 2.0 * w.w11);
    if (w.w20 > 0) a = spadd(a, op(Axis::s, 4), 1.0, w.w20);
    if (w.w02 > 0) a = spadd(a, op(Axis::r, 4), 1.0, w.w02);
    return a;
}

Vector neumann_apply_inverse(const SparseMatrix& a, double alpha, int k, std::span<const double> x, Execution exec) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (k < 0) throw std::invalid_argument("Neumann order must be >= 0");
    if (a.rows() != a.cols() || x.size() != static_cast<std::size_t>(a.rows())) {
        throw std::invalid_argument("neumann_apply_inverse: dimension mismatch");
    }
    const double inv = 1.0 / alpha;
    Vector y(x.begin(), x.end());
    for (double& v : y) v *= inv;
    for (int n = 0; n < k; ++n) {
        const Vector ay = spmv(a, y, exec);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (x[i] - ay[i]) * inv;
    }
    return y;
}

Vector neumann_apply_inverse3(const SparseMatrix& a, double alpha, int k, std::span<const double> phi,
                              Execution exec) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (k < 0) throw std::invalid_argument("Neumann order must be >= 0");
    if (a.rows() != a.cols() || phi.size() != 3 * static_cast<std::size_t>(a.rows())) {
        throw std::invalid_argument("neumann_apply_inverse3: dimension mismatch");
    }
    const double inv = 1.0 / alpha;
    Vector y(phi.begin(), phi.end());
    for (double& v : y) v *= inv;
    for (int n = 0; n < k; ++n) {
        const Vector ay = spmv3(a, y, exec);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (phi[i] - ay[i]) * inv;
    }
    return y;
}

double estimate_spectral_radius(const SparseMatrix& a, int iterations) {
    if (a.rows() == 0) return 0.0;
    Rng rng(12345);
    Vector x(static_cast<std::size_t>(a.rows()));
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    auto nrm = [](const Vector& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return std::sqrt(s);
    };
    // Mean growth of ||A^n x|| over the second half of the run; unlike the
    // Rayleigh quotient this also handles a complex dominant pair.
    double xn = nrm(x);
    double log_growth = 0.0;
    int counted = 0;
    for (int it = 0; it < iterations; ++it) {
        for (double& v : x) v /= xn;
        x = spmv(a, x);
        xn = nrm(x);
        if (xn == 0.0) return 0.0;
        if (it >= iterations / 2) {
            log_growth += std::log(xn);
            ++counted;
        }
    }
    const double lambda = std::exp(log_growth / std::max(counted, 1));
    return lambda;
}

}  // namespace dasm
