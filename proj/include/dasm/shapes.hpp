#pragma once

#include <cstdint>

#include "dasm/mesh.hpp"

namespace dasm {

/// Icosahedron refined by 4-to-1 splits, every vertex projected to `radius`.
[[nodiscard]] TriangleMesh make_icosphere(int subdivisions, double radius = 1.0);

/// Convex hull of `count` Fibonacci-lattice points on a sphere. Gives any
/// vertex count and an irregular mix of vertex degrees.
[[nodiscard]] TriangleMesh make_fibonacci_sphere(int count, double radius = 1.0);

enum class LatticeKind {
    hexagonal,       ///< equilateral triangles
    split_square,    ///< unit squares cut along one diagonal
};

/// Open planar patch in z = 0 with `rows` x `cols` vertices.
[[nodiscard]] TriangleMesh make_plane(int rows, int cols, double spacing = 1.0,
                                      LatticeKind kind = LatticeKind::hexagonal);

/// Moves `vertex` radially so its distance from the origin grows by
/// `offset`.
[[nodiscard]] TriangleMesh make_spike(const TriangleMesh& mesh, VertexId vertex, double offset);

/// Displaces every vertex by an independent uniform sample from the ball of
/// radius `amplitude`. Identical seeds give bitwise-identical output.
[[nodiscard]] TriangleMesh add_noise(const TriangleMesh& mesh, double amplitude, std::uint64_t seed);

/// Per-axis scaling about the origin.
[[nodiscard]] TriangleMesh scale_axes(const TriangleMesh& mesh, const Vec3& axes);

}  // namespace dasm
