#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dasm/vec3.hpp"

namespace dasm {

using VertexId = std::int32_t;
using Face = std::array<VertexId, 3>;

/// Topology or geometry contract violation (bad index, open fan, ...).
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Triangle surface: positions are the stacked parameter vector, faces index into them.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
    [[nodiscard]] std::size_t num_faces() const { return faces.size(); }
};

/// Throws MeshError unless the mesh is non-empty, every index is in range,
/// no face repeats a vertex and every vertex is used by at least one face.
void validate(const TriangleMesh& mesh);

/// Position vector [x0,y0,z0,x1,...] of length 3N.
[[nodiscard]] Vector positions(const TriangleMesh& mesh);

/// Copy of `mesh` with vertex positions replaced by `phi`.
[[nodiscard]] TriangleMesh with_positions(const TriangleMesh& mesh, std::span<const double> phi);

[[nodiscard]] double bounding_box_diagonal(std::span<const double> phi);

/// Unique undirected edges (i < j), sorted.
[[nodiscard]] std::vector<std::array<VertexId, 2>> unique_edges(const TriangleMesh& mesh);

/// Sorted, unordered neighbour sets from the edge list (works on any mesh).
[[nodiscard]] std::vector<std::vector<VertexId>> vertex_neighbors(const TriangleMesh& mesh);

/// Unnormalised face normal (v1 - v0) x (v2 - v0); its norm is twice the area.
[[nodiscard]] Vec3 face_cross(std::span<const double> phi, const Face& f);

enum class BoundaryPolicy {
    reject,  ///< open fans are a MeshError
    pin,     ///< open fans are recorded; such vertices get no chart and stay fixed
};

/// Ordered 1-rings. Neighbors run counter-clockwise about the outward normal
/// implied by the face winding.
struct VertexAdjacency {
    std::vector<std::vector<VertexId>> neighbors;
    std::vector<std::vector<std::int32_t>> incident_faces;
    std::vector<std::uint8_t> on_boundary;

    [[nodiscard]] std::size_t size() const { return neighbors.size(); }
    [[nodiscard]] std::size_t degree(VertexId v) const { return neighbors[static_cast<std::size_t>(v)].size(); }
    [[nodiscard]] bool is_boundary(VertexId v) const { return on_boundary[static_cast<std::size_t>(v)] != 0; }
    [[nodiscard]] bool closed() const;
};

/// Builds ordered 1-rings. Throws MeshError for non-manifold edges,
/// inconsistent winding, and (under BoundaryPolicy::reject) open fans.
[[nodiscard]] VertexAdjacency build_adjacency(const TriangleMesh& mesh,
                                              BoundaryPolicy policy = BoundaryPolicy::reject);

/// Edge-hop distance from `seed` to every vertex, -1 where unreachable.
[[nodiscard]] std::vector<int> ring_distance(const VertexAdjacency& adjacency, VertexId seed);

}  // namespace dasm
