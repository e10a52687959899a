#include "dasm/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "dasm/random.hpp"

namespace dasm {

namespace {

Vec3 normalized(const Vec3& v) { return (1.0 / norm(v)) * v; }

}  // namespace

TriangleMesh make_icosphere(int subdivisions, double radius) {
    if (subdivisions < 0) throw std::invalid_argument("subdivisions must be >= 0");
    const double t = std::numbers::phi;
    TriangleMesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                     {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                  {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (Vec3& v : mesh.vertices) v = normalized(v);

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
        auto split = [&](VertexId a, VertexId b) {
            const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const auto id = static_cast<VertexId>(mesh.vertices.size());
            mesh.vertices.push_back(normalized(mesh.vertices[static_cast<std::size_t>(a)] +
                                               mesh.vertices[static_cast<std::size_t>(b)]));
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Face> refined;
        refined.reserve(4 * mesh.faces.size());
        for (const Face& f : mesh.faces) {
            const VertexId ab = split(f[0], f[1]);
            const VertexId bc = split(f[1], f[2]);
            const VertexId ca = split(f[2], f[0]);
            refined.push_back({f[0], ab, ca});
            refined.push_back({f[1], bc, ab});
            refined.push_back({f[2], ca, bc});
            refined.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(refined);
    }
    for (Vec3& v : mesh.vertices) v = radius * v;
    return mesh;
}

TriangleMesh make_fibonacci_sphere(int count, double radius) {
    if (count < 4) throw std::invalid_argument("a Fibonacci sphere needs at least 4 points");
    const auto n = static_cast<std::size_t>(count);
    std::vector<Vec3> pts(n);
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden_angle * static_cast<double>(i);
        pts[i] = {r * std::cos(th), r * std::sin(th), z};
    }

    // Incremental hull. Vertex i is inserted in index order after a seed
    // tetrahedron; faces are kept outward-oriented.
    struct HullFace {
        Face v;
        Vec3 normal;
        double offset;
        bool alive;
    };
    std::vector<HullFace> faces;
    std::unordered_map<std::uint64_t, std::size_t> edge_face;
    auto key = [](VertexId a, VertexId b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
    };
    auto add_face = [&](VertexId a, VertexId b, VertexId c) {
        const Vec3 nrm = normalized(cross(pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)],
                                          pts[static_cast<std::size_t>(c)] - pts[static_cast<std::size_t>(a)]));
        faces.push_back({{a, b, c}, nrm, dot(nrm, pts[static_cast<std::size_t>(a)]), true});
        const std::size_t id = faces.size() - 1;
        edge_face[key(a, b)] = id;
        edge_face[key(b, c)] = id;
        edge_face[key(c, a)] = id;
    };

    const VertexId s0 = 0;
    const auto s1 = static_cast<VertexId>(n / 3);
    const auto s2 = static_cast<VertexId>((2 * n) / 3);
    const auto s3 = static_cast<VertexId>(n - 1);
    const Vec3& p0 = pts[0];
    const double vol = dot(cross(pts[static_cast<std::size_t>(s1)] - p0, pts[static_cast<std::size_t>(s2)] - p0),
                           pts[static_cast<std::size_t>(s3)] - p0);
    if (std::abs(vol) < 1e-12) throw std::runtime_error("degenerate seed tetrahedron");
    if (vol > 0) {
        add_face(s0, s2, s1);
        add_face(s0, s1, s3);
        add_face(s1, s2, s3);
        add_face(s2, s0, s3);
    } else {
        add_face(s0, s1, s2);
        add_face(s0, s3, s1);
        add_face(s1, s3, s2);
        add_face(s2, s3, s0);
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto vi = static_cast<VertexId>(i);
        if (vi == s1 || vi == s2) continue;
        const Vec3& p = pts[i];
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (faces[f].alive && dot(faces[f].normal, p) - faces[f].offset > 1e-13) visible.push_back(f);
        }
        if (visible.empty()) throw std::runtime_error("Fibonacci point " + std::to_string(i) + " is not extreme");
        std::vector<std::pair<VertexId, VertexId>> horizon;
        for (std::size_t f : visible) faces[f].alive = false;
        for (std::size_t f : visible) {
            const Face& v = faces[f].v;
            for (int k = 0; k < 3; ++k) {
                const VertexId a = v[k];
                const VertexId b = v[(k + 1) % 3];
                const std::size_t other = edge_face.at(key(b, a));
                if (faces[other].alive) horizon.emplace_back(a, b);
            }
        }
        for (std::size_t f : visible) {
            const Face& v = faces[f].v;
            for (int k = 0; k < 3; ++k) edge_face.erase(key(v[k], v[(k + 1) % 3]));
        }
        for (const auto& [a, b] : horizon) add_face(a, b, vi);
    }

    TriangleMesh mesh;
    mesh.vertices.reserve(n);
    for (const Vec3& p : pts) mesh.vertices.push_back(radius * p);
    for (const HullFace& f : faces) {
        if (f.alive) mesh.faces.push_back(f.v);
    }
    validate(mesh);
    return mesh;
}

TriangleMesh make_plane(int rows, int cols, double spacing, LatticeKind kind) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("a plane needs at least 2 x 2 vertices");
    TriangleMesh mesh;
    const double row_height = kind == LatticeKind::hexagonal ? spacing * std::sqrt(3.0) / 2.0 : spacing;
    for (int i = 0; i < rows; ++i) {
        const double shift = (kind == LatticeKind::hexagonal && i % 2 == 1) ? spacing / 2.0 : 0.0;
        for (int j = 0; j < cols; ++j) {
            mesh.vertices.push_back({j * spacing + shift, i * row_height, 0.0});
        }
    }
    auto id = [cols](int i, int j) { return static_cast<VertexId>(i * cols + j); };
    for (int i = 0; i + 1 < rows; ++i) {
        for (int j = 0; j + 1 < cols; ++j) {
            if (kind == LatticeKind::split_square) {
                mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
                mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
            } else if (i % 2 == 0) {
                mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
                mesh.faces.push_back({id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
            } else {
                mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
                mesh.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            }
        }
    }
    return mesh;
}

TriangleMesh make_spike(const TriangleMesh& mesh, VertexId vertex, double offset) {
    if (vertex < 0 || static_cast<std::size_t>(vertex) >= mesh.vertices.size()) {
        throw std::out_of_range("spike vertex out of range");
    }
    TriangleMesh out = mesh;
    Vec3& v = out.vertices[static_cast<std::size_t>(vertex)];
    const double r = norm(v);
    if (r == 0.0) throw std::invalid_argument("cannot spike a vertex at the origin");
    v = ((r + offset) / r) * v;
    return out;
}

TriangleMesh add_noise(const TriangleMesh& mesh, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
    TriangleMesh out = mesh;
    if (amplitude == 0.0) return out;
    Rng rng(seed);
    for (Vec3& v : out.vertices) {
        Vec3 d{};
        do {
            d = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        } while (norm2(d) > 1.0);
        v += amplitude * d;
    }
    return out;
}

TriangleMesh scale_axes(const TriangleMesh& mesh, const Vec3& axes) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = {v[0] * axes[0], v[1] * axes[1], v[2] * axes[2]};
    return out;
}

}  // namespace dasm
