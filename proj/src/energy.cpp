#include "dasm/energy.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace dasm {

namespace {

std::size_t idx(VertexId v) { return static_cast<std::size_t>(v); }

void check_size(const TriangleMesh& mesh, std::span<const double> phi) {
    if (phi.size() != 3 * mesh.num_vertices()) throw std::invalid_argument("position vector size mismatch");
}

/// Pulls a gradient on the unit normal of face f back onto its vertices.
void add_normal_gradient(std::span<const double> phi, const Face& f, const Vec3& g_normal, Vector& grad) {
    const Vec3 v0 = get3(phi, idx(f[0]));
    const Vec3 e1 = get3(phi, idx(f[1])) - v0;
    const Vec3 e2 = get3(phi, idx(f[2])) - v0;
    const Vec3 c = cross(e1, e2);
    const double len = norm(c);
    if (!(len > 0.0)) throw MeshError("zero-area face has no normal");
    const Vec3 n = (1.0 / len) * c;
    const Vec3 h = (1.0 / len) * (g_normal - dot(g_normal, n) * n);
    const Vec3 g1 = cross(e2, h);
    const Vec3 g2 = cross(h, e1);
    add3(grad, idx(f[1]), g1);
    add3(grad, idx(f[2]), g2);
    add3(grad, idx(f[0]), -1.0 * (g1 + g2));
}

Vec3 unit_normal(std::span<const double> phi, const Face& f) {
    const Vec3 c = face_cross(phi, f);
    const double len = norm(c);
    if (!(len > 0.0)) throw MeshError("zero-area face has no normal");
    return (1.0 / len) * c;
}

void add_bary(const Face& f, const std::array<double, 3>& b, const Vec3& g, Vector& grad) {
    for (int k = 0; k < 3; ++k) add3(grad, idx(f[k]), b[k] * g);
}

}  // namespace

CloudAttraction::CloudAttraction(const TargetCloud& target, double gain) : tree_(target.points), gain_(gain) {
    if (target.points.empty()) throw std::invalid_argument("attraction target cloud is empty");
}

Vector CloudAttraction::operator()(const TriangleMesh& topology, std::span<const double> phi) const {
    check_size(topology, phi);
    const std::size_t n = topology.num_vertices();
    std::vector<Vec3> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = get3(phi, i);
    const auto nn = nearest_all(tree_, q);
    Vector f(3 * n);
    for (std::size_t i = 0; i < n; ++i)
        set3(f, i, gain_ * (tree_.points()[static_cast<std::size_t>(nn[i].index)] - q[i]));
    return f;
}

ForceField cloud_attraction_force(const TargetCloud& target, double gain) {
    auto field = std::make_shared<CloudAttraction>(target, gain);
    return [field](const TriangleMesh& m, std::span<const double> phi) { return (*field)(m, phi); };
}

LossValue edge_length_loss(const TriangleMesh& mesh, std::span<const double> phi) {
    check_size(mesh, phi);
    const auto edges = unique_edges(mesh);
    LossValue out{0.0, Vector(phi.size(), 0.0)};
    if (edges.empty()) return out;
    const double inv = 1.0 / static_cast<double>(edges.size());
    for (const auto& e : edges) {
        const Vec3 d = get3(phi, idx(e[0])) - get3(phi, idx(e[1]));
        out.value += norm2(d) * inv;
        add3(out.gradient, idx(e[0]), 2.0 * inv * d);
        add3(out.gradient, idx(e[1]), -2.0 * inv * d);
    }
    return out;
}

LossValue laplacian_loss(const TriangleMesh& mesh, std::span<const double> phi) {
    check_size(mesh, phi);
    const auto nb = vertex_neighbors(mesh);
    LossValue out{0.0, Vector(phi.size(), 0.0)};
    const double inv = 1.0 / static_cast<double>(nb.size());
    for (std::size_t v = 0; v < nb.size(); ++v) {
        if (nb[v].empty()) continue;
        const double w = 1.0 / static_cast<double>(nb[v].size());
        Vec3 c{0.0, 0.0, 0.0};
        for (VertexId j : nb[v]) c += get3(phi, idx(j));
        const Vec3 d = w * c - get3(phi, v);
        out.value += norm2(d) * inv;
        add3(out.gradient, v, -2.0 * inv * d);
        for (VertexId j : nb[v]) add3(out.gradient, idx(j), 2.0 * inv * w * d);
    }
    return out;
}

LossValue normal_consistency_loss(const TriangleMesh& mesh, std::span<const double> phi) {
    check_size(mesh, phi);
    std::map<std::pair<VertexId, VertexId>, std::vector<std::size_t>> edge_faces;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        for (int k = 0; k < 3; ++k) {
            VertexId a = mesh.faces[f][k];
            VertexId b = mesh.faces[f][(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_faces[{a, b}].push_back(f);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [e, fs] : edge_faces)
        if (fs.size() == 2) pairs.emplace_back(fs[0], fs[1]);

    LossValue out{0.0, Vector(phi.size(), 0.0)};
    if (pairs.empty()) return out;
    std::vector<Vec3> normals(mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) normals[f] = unit_normal(phi, mesh.faces[f]);
    std::vector<Vec3> g(mesh.num_faces(), Vec3{0.0, 0.0, 0.0});
    const double inv = 1.0 / static_cast<double>(pairs.size());
    for (const auto& [f1, f2] : pairs) {
        out.value += (1.0 - dot(normals[f1], normals[f2])) * inv;
        g[f1] -= inv * normals[f2];
        g[f2] -= inv * normals[f1];
    }
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        if (norm2(g[f]) > 0.0) add_normal_gradient(phi, mesh.faces[f], g[f], out.gradient);
    return out;
}

LossValue chamfer_loss(const TriangleMesh& mesh, std::span<const double> phi, const SampleLayout& layout,
                       const TargetCloud& target) {
    check_size(mesh, phi);
    if (target.points.empty()) throw std::invalid_argument("chamfer target is empty");
    if (layout.size() == 0) throw std::invalid_argument("chamfer loss needs at least one sample");
    const SampledSurface s = realize_samples(mesh, phi, layout);
    const KdTree target_tree(target.points);
    const KdTree sample_tree(s.points);
    const auto st = nearest_all(target_tree, s.points);
    const auto ts = nearest_all(sample_tree, target.points);

    LossValue out{0.0, Vector(phi.size(), 0.0)};
    const double inv_s = 1.0 / static_cast<double>(s.size());
    const double inv_t = 1.0 / static_cast<double>(target.points.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 d = s.points[i] - target.points[static_cast<std::size_t>(st[i].index)];
        out.value += norm2(d) * inv_s;
        add_bary(mesh.faces[static_cast<std::size_t>(layout.faces[i])], layout.bary[i], 2.0 * inv_s * d,
                 out.gradient);
    }
    for (std::size_t j = 0; j < target.points.size(); ++j) {
        const auto p = static_cast<std::size_t>(ts[j].index);
        const Vec3 d = s.points[p] - target.points[j];
        out.value += norm2(d) * inv_t;
        add_bary(mesh.faces[static_cast<std::size_t>(layout.faces[p])], layout.bary[p], 2.0 * inv_t * d,
                 out.gradient);
    }
    return out;
}

LossValue normal_distance_loss(const TriangleMesh& mesh, std::span<const double> phi, const SampleLayout& layout,
                               const TargetCloud& target) {
    check_size(mesh, phi);
    if (!target.has_normals()) throw std::invalid_argument("normal distance loss needs target normals");
    if (target.points.empty()) throw std::invalid_argument("normal distance target is empty");
    if (layout.size() == 0) throw std::invalid_argument("normal distance loss needs at least one sample");
    const SampledSurface s = realize_samples(mesh, phi, layout);
    const KdTree target_tree(target.points);
    const KdTree sample_tree(s.points);
    const auto st = nearest_all(target_tree, s.points);
    const auto ts = nearest_all(sample_tree, target.points);

    std::vector<Vec3> g(mesh.num_faces(), Vec3{0.0, 0.0, 0.0});
    double ca = 0.0;
    double cb = 0.0;
    const double inv_s = 1.0 / static_cast<double>(s.size());
    const double inv_t = 1.0 / static_cast<double>(target.points.size());
    const auto accumulate = [&](std::size_t sample, const Vec3& m, double weight, double& sum) {
        const auto f = static_cast<std::size_t>(layout.faces[sample]);
        const double c = dot(s.normals[sample], m);
        sum += std::abs(c);
        const double sign = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
        g[f] -= (0.5 * weight * sign) * m;
    };
    for (std::size_t i = 0; i < s.size(); ++i)
        accumulate(i, target.normals[static_cast<std::size_t>(st[i].index)], inv_s, ca);
    for (std::size_t j = 0; j < target.points.size(); ++j)
        accumulate(static_cast<std::size_t>(ts[j].index), target.normals[j], inv_t, cb);

    LossValue out{1.0 - 0.5 * (ca * inv_s + cb * inv_t), Vector(phi.size(), 0.0)};
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        if (norm2(g[f]) > 0.0) add_normal_gradient(phi, mesh.faces[f], g[f], out.gradient);
    return out;
}

LossBreakdown total_loss(const TriangleMesh& mesh, std::span<const double> phi, const TargetCloud& target,
                         const LossWeights& w, const LossOptions& options) {
    check_size(mesh, phi);
    LossBreakdown out;
    out.total.gradient.assign(phi.size(), 0.0);
    const auto add = [&](const LossValue& term, double weight, double& slot) {
        slot = term.value;
        out.total.value += weight * term.value;
        for (std::size_t i = 0; i < phi.size(); ++i) out.total.gradient[i] += weight * term.gradient[i];
    };
    if (w.lambda_cf != 0.0 || w.lambda_ndist != 0.0) {
        const SampleLayout layout =
            options.layout ? *options.layout : make_sample_layout(mesh, phi, options.sample_count, options.seed);
        if (w.lambda_cf != 0.0) add(chamfer_loss(mesh, phi, layout, target), w.lambda_cf, out.chamfer);
        if (w.lambda_ndist != 0.0)
            add(normal_distance_loss(mesh, phi, layout, target), w.lambda_ndist, out.normal_distance);
    }
    if (w.lambda_edge != 0.0) add(edge_length_loss(mesh, phi), w.lambda_reg * w.lambda_edge, out.edge);
    if (w.lambda_lap != 0.0) add(laplacian_loss(mesh, phi), w.lambda_reg * w.lambda_lap, out.laplacian);
    if (w.lambda_ncons != 0.0)
        add(normal_consistency_loss(mesh, phi), w.lambda_reg * w.lambda_ncons, out.normal_consistency);
    return out;
}

ForceField loss_force(const TargetCloud& target, const LossWeights& weights, LossOptions options) {
    return [target, weights, options](const TriangleMesh& mesh, std::span<const double> phi) {
        Vector g = total_loss(mesh, phi, target, weights, options).total.gradient;
        for (double& v : g) v = -v;
        return g;
    };
}

double deformation_energy(const TriangleMesh& mesh, const ChartSet& charts, std::span<const double> phi,
                          const RegularizerWeights& w) {
    check_size(mesh, phi);
    w.validate();
    const auto energy = [&](const SparseMatrix& d) {
        const Vector y = spmv3(d, phi);
        double s = 0.0;
        for (double v : y) s += v * v;
        return s;
    };
    const auto op = [&](Axis axis, int order) { return build_derivative_operator(mesh, charts, {axis, order}); };
    double e = 0.0;
    if (w.w10 > 0) e += w.w10 * energy(op(Axis::s, 1));
    if (w.w01 > 0) e += w.w01 * energy(op(Axis::r, 1));
    if (w.w11 > 0) e += 2.0 * w.w11 * energy(spmul(op(Axis::s, 1), op(Axis::r, 1)));
    if (w.w20 > 0) e += w.w20 * energy(op(Axis::s, 2));
    if (w.w02 > 0) e += w.w02 * energy(op(Axis::r, 2));
    return e;
}

}  // namespace dasm
