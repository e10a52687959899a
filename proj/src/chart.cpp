#include "dasm/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dasm {

namespace {

constexpr double kInsideTol = 1e-12;

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Distance from the origin to segment [a, b].
double origin_segment_distance(const Vec2& a, const Vec2& b) {
    const Vec2 ab{b[0] - a[0], b[1] - a[1]};
    const double len2 = ab[0] * ab[0] + ab[1] * ab[1];
    double t = len2 > 0.0 ? -(a[0] * ab[0] + a[1] * ab[1]) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 p{a[0] + t * ab[0], a[1] + t * ab[1]};
    return std::hypot(p[0], p[1]);
}

}  // namespace

LocalChart make_uniform_chart(VertexId center, std::span<const VertexId> neighbors) {
    if (neighbors.size() < 3) throw MeshError("chart needs at least 3 neighbors");
    LocalChart chart;
    chart.center = center;
    chart.neighbors.assign(neighbors.begin(), neighbors.end());
    const auto d = static_cast<double>(neighbors.size());
    chart.coords.reserve(neighbors.size());
    for (std::size_t j = 0; j < neighbors.size(); ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / d;
        chart.coords.push_back({std::cos(theta), std::sin(theta)});
    }
    chart.delta = choose_delta(chart);
    return chart;
}

LocalChart build_chart(const TriangleMesh& mesh, const VertexAdjacency& adjacency, VertexId vertex) {
    if (adjacency.size() != mesh.num_vertices()) throw std::invalid_argument("adjacency does not match mesh");
    if (adjacency.is_boundary(vertex)) {
        throw MeshError("vertex " + std::to_string(vertex) + " has an open fan; no chart");
    }
    return make_uniform_chart(vertex, adjacency.neighbors[static_cast<std::size_t>(vertex)]);
}

ChartSet build_charts(const TriangleMesh& mesh, const VertexAdjacency& adjacency) {
    ChartSet charts(mesh.num_vertices());
    for (std::size_t v = 0; v < charts.size(); ++v) {
        if (!adjacency.is_boundary(static_cast<VertexId>(v))) {
            charts[v] = build_chart(mesh, adjacency, static_cast<VertexId>(v));
        }
    }
    return charts;
}

double chart_inradius(const LocalChart& chart) {
    double r = std::numeric_limits<double>::infinity();
    const std::size_t d = chart.coords.size();
    for (std::size_t j = 0; j < d; ++j) {
        r = std::min(r, origin_segment_distance(chart.coords[j], chart.coords[(j + 1) % d]));
    }
    return r;
}

bool strictly_inside(const LocalChart& chart, const Vec2& p) {
    const std::size_t d = chart.coords.size();
    bool inside = false;
    for (std::size_t j = 0; j < d; ++j) {
        const Vec2& a = chart.coords[j];
        const Vec2& b = chart.coords[(j + 1) % d];
        const Vec2 ab{b[0] - a[0], b[1] - a[1]};
        const Vec2 ap{p[0] - a[0], p[1] - a[1]};
        const double len = std::hypot(ab[0], ab[1]);
        if (std::abs(cross2(ab, ap)) <= kInsideTol * len &&
            ap[0] * ab[0] + ap[1] * ab[1] >= 0.0 && ap[0] * ab[0] + ap[1] * ab[1] <= len * len) {
            return false;
        }
        if ((a[1] > p[1]) != (b[1] > p[1])) {
            const double x = a[0] + (p[1] - a[1]) * ab[0] / ab[1];
            if (p[0] < x) inside = !inside;
        }
    }
    return inside;
}

double choose_delta(const LocalChart& chart) {
    const double inradius = chart_inradius(chart);
    if (!(inradius > 1e-12)) throw ChartError("degenerate chart polygon (zero inradius)");
    const double delta = kDeltaSafety * inradius / (2.0 * std::numbers::sqrt2);
    for (int k1 = -2; k1 <= 2; ++k1) {
        for (int k2 = -2; k2 <= 2; ++k2) {
            if (!strictly_inside(chart, {k1 * delta, k2 * delta})) {
                throw ChartError("stencil offset escapes the chart polygon");
            }
        }
    }
    return delta;
}

ChartLocation locate_point(const LocalChart& chart, const Vec2& offset) {
    const std::size_t d = chart.coords.size();
    for (std::size_t j = 0; j < d; ++j) {
        const Vec2& p1 = chart.coords[j];
        const Vec2& p2 = chart.coords[(j + 1) % d];
        // [s; r; 1] = [0 s1 s2; 0 r1 r2; 1 1 1] [l; l1; l2] with the center at
        // the origin reduces to a 2x2 system for (l1, l2).
        const double det = cross2(p1, p2);
        if (std::abs(det) < 1e-300) continue;
        double l1 = cross2(offset, p2) / det;
        double l2 = cross2(p1, offset) / det;
        double l0 = 1.0 - l1 - l2;
        if (l0 < -kInsideTol || l1 < -kInsideTol || l2 < -kInsideTol) continue;
        std::array<double, 3> w{l0, l1, l2};
        // Snap round-off negatives on shared edges to zero, keeping the sum.
        double spill = 0.0;
        for (double& x : w) {
            if (x < 0.0) {
                spill += x;
                x = 0.0;
            }
        }
        *std::max_element(w.begin(), w.end()) += spill;
        ChartLocation loc;
        loc.facet = static_cast<int>(j);
        loc.vertices = {chart.center, chart.neighbors[j], chart.neighbors[(j + 1) % d]};
        loc.weights = w;
        return loc;
    }
    throw ChartError("offset (" + std::to_string(offset[0]) + ", " + std::to_string(offset[1]) +
                     ") lies outside the chart of vertex " + std::to_string(chart.center));
}

double InterpolationRow::weight_sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
}

double InterpolationRow::weight(VertexId v) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), v,
                               [](const std::pair<VertexId, double>& e, VertexId id) { return e.first < id; });
    return (it != entries.end() && it->first == v) ? it->second : 0.0;
}

InterpolationRow interpolation_row(const LocalChart& chart, const Vec2& offset) {
    const ChartLocation loc = locate_point(chart, offset);
    InterpolationRow row;
    for (int k = 0; k < 3; ++k) {
        if (loc.weights[k] != 0.0) row.entries.emplace_back(loc.vertices[k], loc.weights[k]);
    }
    std::sort(row.entries.begin(), row.entries.end());
    return row;
}

}  // namespace dasm
