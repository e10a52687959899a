#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dasm/mesh.hpp"

namespace dasm {

using Vec2 = std::array<double, 2>;

/// Raised when a chart query falls outside every fan triangle.
class ChartError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// 2D (s, r) layout of a vertex and its ordered 1-ring. The center sits at
/// the origin; the s axis points at neighbor 0.
struct LocalChart {
    VertexId center = -1;
    std::vector<VertexId> neighbors;
    std::vector<Vec2> coords;  ///< one per neighbor
    double delta = 0.0;        ///< finite-difference step, chart units

    [[nodiscard]] std::size_t degree() const { return neighbors.size(); }
};

/// Neighbor j at angle 2*pi*j/d on the unit circle, delta from choose_delta.
[[nodiscard]] LocalChart make_uniform_chart(VertexId center, std::span<const VertexId> neighbors);

/// Chart for a closed-fan vertex. Throws MeshError on an open fan.
[[nodiscard]] LocalChart build_chart(const TriangleMesh& mesh, const VertexAdjacency& adjacency, VertexId vertex);

/// Per-vertex charts; empty entries mark boundary vertices that carry no
/// stencil (only possible under BoundaryPolicy::pin).
using ChartSet = std::vector<std::optional<LocalChart>>;

[[nodiscard]] ChartSet build_charts(const TriangleMesh& mesh, const VertexAdjacency& adjacency);

/// Safety factor in delta = c * inradius / (2 sqrt 2).
inline constexpr double kDeltaSafety = 0.9;

/// Largest stencil half-width that keeps every offset (k1*delta, k2*delta),
/// |k1|,|k2| <= 2, strictly inside the chart polygon. Throws ChartError for
/// a degenerate polygon.
[[nodiscard]] double choose_delta(const LocalChart& chart);

/// Distance from the origin to the nearest polygon edge.
[[nodiscard]] double chart_inradius(const LocalChart& chart);

/// Crossing-number test against the chart polygon; points on the boundary
/// count as outside.
[[nodiscard]] bool strictly_inside(const LocalChart& chart, const Vec2& p);

struct ChartLocation {
    int facet = -1;                     ///< fan triangle (center, n_j, n_{j+1}), j = facet
    std::array<VertexId, 3> vertices{};  ///< global ids of that triangle
    std::array<double, 3> weights{};    ///< (lambda, lambda1, lambda2), sums to 1
};

/// Barycentric coordinates of `offset` in the first fan triangle that
/// contains it. Throws ChartError if no triangle does.
[[nodiscard]] ChartLocation locate_point(const LocalChart& chart, const Vec2& offset);

/// Interpolation weights keyed by global vertex id, sorted by id.
struct InterpolationRow {
    std::vector<std::pair<VertexId, double>> entries;

    [[nodiscard]] double weight_sum() const;
    [[nodiscard]] double weight(VertexId v) const;
};

[[nodiscard]] InterpolationRow interpolation_row(const LocalChart& chart, const Vec2& offset);

}  // namespace dasm
