#include "dasm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dasm/random.hpp"
#include "dasm/spatial.hpp"

namespace dasm {

namespace {

void require_points(const SampledSurface& s, const char* what) {
    if (s.points.empty()) throw std::invalid_argument(std::string(what) + ": empty sample set");
}

Vec3 unit_or_zero(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? (1.0 / n) * v : Vec3{0.0, 0.0, 0.0};
}

}  // namespace

SampleLayout make_sample_layout(const TriangleMesh& mesh, std::span<const double> phi, std::size_t count,
                                std::uint64_t seed) {
    SampleLayout layout;
    layout.seed = seed;
    if (count == 0) return layout;
    if (phi.size() != 3 * mesh.num_vertices()) throw std::invalid_argument("position vector size mismatch");

    std::vector<double> cumulative(mesh.num_faces());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        total += 0.5 * norm(face_cross(phi, mesh.faces[f]));
        cumulative[f] = total;
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw MeshError("cannot sample a mesh with zero surface area");

    Rng rng(seed);
    layout.faces.reserve(count);
    layout.bary.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        const double s = std::sqrt(rng.uniform());
        const double t = rng.uniform();
        layout.faces.push_back(static_cast<std::int32_t>(it - cumulative.begin()));
        layout.bary.push_back({1.0 - s, s * (1.0 - t), s * t});
    }
    return layout;
}

SampledSurface realize_samples(const TriangleMesh& mesh, std::span<const double> phi, const SampleLayout& layout) {
    SampledSurface out;
    out.seed = layout.seed;
    out.source = "mesh";
    out.points.reserve(layout.size());
    out.normals.reserve(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const Face& f = mesh.faces[static_cast<std::size_t>(layout.faces[i])];
        const auto& b = layout.bary[i];
        Vec3 p{0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k) p += b[k] * get3(phi, static_cast<std::size_t>(f[k]));
        out.points.push_back(p);
        out.normals.push_back(unit_or_zero(face_cross(phi, f)));
    }
    return out;
}

SampledSurface sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
    const Vector phi = positions(mesh);
    return realize_samples(mesh, phi, make_sample_layout(mesh, phi, count, seed));
}

SampledSurface as_sampled(const TargetCloud& cloud, std::string source) {
    SampledSurface s;
    s.points = cloud.points;
    s.normals = cloud.normals;
    s.source = std::move(source);
    return s;
}

TargetCloud as_cloud(const SampledSurface& s) { return TargetCloud{s.points, s.normals}; }

SurfaceScores compare_surfaces(const SampledSurface& a, const SampledSurface& b, std::span<const double> taus,
                               Execution exec) {
    require_points(a, "compare_surfaces");
    require_points(b, "compare_surfaces");
    for (double tau : taus)
        if (!(tau > 0.0)) throw std::invalid_argument("F1 threshold must be positive");

    const KdTree tree_a(a.points);
    const KdTree tree_b(b.points);
    const auto ab = nearest_all(tree_b, a.points, exec);
    const auto ba = nearest_all(tree_a, b.points, exec);

    SurfaceScores scores;
    double sa = 0.0;
    double sb = 0.0;
    for (const auto& n : ab) sa += n.dist2;
    for (const auto& n : ba) sb += n.dist2;
    scores.chamfer = sa / static_cast<double>(ab.size()) + sb / static_cast<double>(ba.size());

    const bool normals = a.normals.size() == a.size() && b.normals.size() == b.size();
    if (normals) {
        double ca = 0.0;
        double cb = 0.0;
        for (std::size_t i = 0; i < ab.size(); ++i)
            ca += std::abs(dot(a.normals[i], b.normals[static_cast<std::size_t>(ab[i].index)]));
        for (std::size_t i = 0; i < ba.size(); ++i)
            cb += std::abs(dot(b.normals[i], a.normals[static_cast<std::size_t>(ba[i].index)]));
        scores.normal = 0.5 * (ca / static_cast<double>(ab.size()) + cb / static_cast<double>(ba.size()));
    }

    for (double tau : taus) {
        const double t2 = tau * tau;
        const auto within = [t2](const std::vector<Neighbor>& v) {
            std::size_t c = 0;
            for (const auto& n : v) c += n.dist2 <= t2 ? 1 : 0;
            return static_cast<double>(c) / static_cast<double>(v.size());
        };
        const double precision = within(ab);
        const double recall = within(ba);
        const double f1 = precision + recall > 0.0 ? 200.0 * precision * recall / (precision + recall) : 0.0;
        scores.f1.emplace_back(tau, f1);
    }
    return scores;
}

double chamfer_distance(const SampledSurface& a, const SampledSurface& b) {
    return compare_surfaces(a, b, {}).chamfer;
}

double normal_distance(const SampledSurface& a, const SampledSurface& b) {
    const auto s = compare_surfaces(a, b, {});
    if (!s.normal) throw std::invalid_argument("normal_distance needs normals on both sample sets");
    return *s.normal;
}

double f1_at_tau(const SampledSurface& a, const SampledSurface& b, double tau) {
    const double taus[] = {tau};
    return compare_surfaces(a, b, taus).f1.front().second;
}

double mean_edge_length(const TriangleMesh& mesh, std::span<const double> phi) {
    const auto edges = unique_edges(mesh);
    if (edges.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& e : edges)
        sum += norm(get3(phi, static_cast<std::size_t>(e[0])) - get3(phi, static_cast<std::size_t>(e[1])));
    return sum / static_cast<double>(edges.size());
}

double mean_surface_laplacian(const TriangleMesh& mesh, std::span<const double> phi) {
    const auto nb = vertex_neighbors(mesh);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t v = 0; v < nb.size(); ++v) {
        if (nb[v].empty()) continue;
        Vec3 c{0.0, 0.0, 0.0};
        for (VertexId j : nb[v]) c += get3(phi, static_cast<std::size_t>(j));
        c = (1.0 / static_cast<double>(nb[v].size())) * c;
        sum += norm(c - get3(phi, v));
        ++counted;
    }
    return counted ? sum / static_cast<double>(counted) : 0.0;
}

}  // namespace dasm
