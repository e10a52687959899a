#include "dasm/mesh.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <string>

namespace dasm {

void validate(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) throw MeshError("mesh has no vertices");
    if (mesh.faces.empty()) throw MeshError("mesh has no faces");
    const auto n = static_cast<VertexId>(mesh.vertices.size());
    std::vector<std::uint8_t> used(mesh.vertices.size(), 0);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (VertexId v : face) {
            if (v < 0 || v >= n) {
                throw MeshError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                                " outside [0, " + std::to_string(n) + ")");
            }
            used[static_cast<std::size_t>(v)] = 1;
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw MeshError("face " + std::to_string(f) + " repeats a vertex index");
        }
    }
    for (std::size_t v = 0; v < used.size(); ++v) {
        if (!used[v]) throw MeshError("vertex " + std::to_string(v) + " is not referenced by any face");
    }
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        for (double c : mesh.vertices[v]) {
            if (!std::isfinite(c)) throw MeshError("vertex " + std::to_string(v) + " has a non-finite coordinate");
        }
    }
}

Vector positions(const TriangleMesh& mesh) {
    Vector phi(3 * mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) set3(phi, i, mesh.vertices[i]);
    return phi;
}

TriangleMesh with_positions(const TriangleMesh& mesh, std::span<const double> phi) {
    if (phi.size() != 3 * mesh.vertices.size()) {
        throw std::invalid_argument("position vector length does not match vertex count");
    }
    TriangleMesh out;
    out.faces = mesh.faces;
    out.vertices.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] = get3(phi, i);
    return out;
}

double bounding_box_diagonal(std::span<const double> phi) {
    if (phi.empty()) return 0.0;
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-lo[0], -lo[1], -lo[2]};
    for (std::size_t i = 0; i < phi.size() / 3; ++i) {
        const Vec3 p = get3(phi, i);
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    return norm(hi - lo);
}

std::vector<std::array<VertexId, 2>> unique_edges(const TriangleMesh& mesh) {
    std::vector<std::array<VertexId, 2>> edges;
    edges.reserve(3 * mesh.faces.size());
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            VertexId a = f[k];
            VertexId b = f[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.push_back({a, b});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<std::vector<VertexId>> vertex_neighbors(const TriangleMesh& mesh) {
    std::vector<std::vector<VertexId>> nb(mesh.num_vertices());
    for (const auto& e : unique_edges(mesh)) {
        nb[static_cast<std::size_t>(e[0])].push_back(e[1]);
        nb[static_cast<std::size_t>(e[1])].push_back(e[0]);
    }
    for (auto& n : nb) std::sort(n.begin(), n.end());
    return nb;
}

Vec3 face_cross(std::span<const double> phi, const Face& f) {
    const Vec3 a = get3(phi, static_cast<std::size_t>(f[0]));
    return cross(get3(phi, static_cast<std::size_t>(f[1])) - a, get3(phi, static_cast<std::size_t>(f[2])) - a);
}

bool VertexAdjacency::closed() const {
    return std::none_of(on_boundary.begin(), on_boundary.end(), [](std::uint8_t b) { return b != 0; });
}

namespace {

std::uint64_t edge_key(VertexId a, VertexId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

VertexAdjacency build_adjacency(const TriangleMesh& mesh, BoundaryPolicy policy) {
    validate(mesh);
    const std::size_t n = mesh.vertices.size();

    // Directed half-edges must be unique (consistent winding); undirected
    // edges must carry one or two faces.
    std::map<std::uint64_t, int> directed;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            const VertexId a = face[k];
            const VertexId b = face[(k + 1) % 3];
            if (!directed.emplace(edge_key(a, b), static_cast<int>(f)).second) {
                const bool twice = directed.count(edge_key(b, a)) != 0;
                throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") " +
                                (twice ? "has more than two incident faces"
                                       : "is traversed twice in the same direction (inconsistent winding)"));
            }
        }
    }

    VertexAdjacency adj;
    adj.neighbors.resize(n);
    adj.incident_faces.resize(n);
    adj.on_boundary.assign(n, 0);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        for (VertexId v : mesh.faces[f]) adj.incident_faces[static_cast<std::size_t>(v)].push_back(static_cast<int>(f));
    }

    for (std::size_t v = 0; v < n; ++v) {
        // Each incident face (v, b, c) in CCW order contributes the arc b -> c.
        std::map<VertexId, VertexId> succ;
        std::map<VertexId, int> in_degree;
        VertexId first = -1;
        for (int f : adj.incident_faces[v]) {
            const Face& face = mesh.faces[static_cast<std::size_t>(f)];
            int k = 0;
            while (face[k] != static_cast<VertexId>(v)) ++k;
            const VertexId b = face[(k + 1) % 3];
            const VertexId c = face[(k + 2) % 3];
            if (first < 0) first = b;
            if (!succ.emplace(b, c).second) {
                throw MeshError("vertex " + std::to_string(v) + " has a non-manifold fan");
            }
            ++in_degree[c];
            in_degree.try_emplace(b, 0);
        }

        VertexId start = first;
        bool open = false;
        for (const auto& [u, deg] : in_degree) {
            if (deg == 0) {
                if (open) throw MeshError("vertex " + std::to_string(v) + " has a non-manifold fan");
                open = true;
                start = u;
            }
        }
        if (open && policy == BoundaryPolicy::reject) {
            throw MeshError("vertex " + std::to_string(v) + " lies on an open boundary");
        }

        std::vector<VertexId>& ring = adj.neighbors[v];
        VertexId cur = start;
        for (;;) {
            ring.push_back(cur);
            auto it = succ.find(cur);
            if (it == succ.end()) break;
            cur = it->second;
            if (cur == start) break;
            if (ring.size() > succ.size() + 1) break;
        }
        const std::size_t expected = succ.size() + (open ? 1 : 0);
        if (ring.size() != expected) {
            throw MeshError("vertex " + std::to_string(v) + " has a fan made of several disconnected pieces");
        }
        if (!open && ring.size() < 3) {
            throw MeshError("vertex " + std::to_string(v) + " has degree below 3");
        }
        adj.on_boundary[v] = open ? 1 : 0;
    }
    return adj;
}

std::vector<int> ring_distance(const VertexAdjacency& adjacency, VertexId seed) {
    std::vector<int> dist(adjacency.size(), -1);
    std::deque<VertexId> queue{seed};
    dist[static_cast<std::size_t>(seed)] = 0;
    while (!queue.empty()) {
        const VertexId v = queue.front();
        queue.pop_front();
        for (VertexId u : adjacency.neighbors[static_cast<std::size_t>(v)]) {
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

}  // namespace dasm
