#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>

#include "dasm/mesh.hpp"
#include "dasm/shapes.hpp"

using namespace dasm;

namespace {

TriangleMesh tetrahedron() {
    TriangleMesh m;
    m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return m;
}

// Position of `b` after `a` in a cyclic ring, or -1.
int cyclic_gap(const std::vector<VertexId>& ring, VertexId a, VertexId b) {
    const auto ia = std::find(ring.begin(), ring.end(), a) - ring.begin();
    const auto ib = std::find(ring.begin(), ring.end(), b) - ring.begin();
    if (ia == static_cast<long>(ring.size()) || ib == static_cast<long>(ring.size())) return -1;
    return static_cast<int>((ib - ia + static_cast<long>(ring.size())) % static_cast<long>(ring.size()));
}

}  // namespace

TEST_CASE("validate accepts a well-formed tetrahedron") { CHECK_NOTHROW(validate(tetrahedron())); }

TEST_CASE("validate rejects malformed meshes") {
    TriangleMesh empty;
    CHECK_THROWS_AS(validate(empty), MeshError);

    TriangleMesh no_faces = tetrahedron();
    no_faces.faces.clear();
    CHECK_THROWS_AS(validate(no_faces), MeshError);

    TriangleMesh bad_index = tetrahedron();
    bad_index.faces[0][2] = 4;
    CHECK_THROWS_AS(validate(bad_index), MeshError);

    TriangleMesh negative = tetrahedron();
    negative.faces[1][0] = -1;
    CHECK_THROWS_AS(validate(negative), MeshError);

    TriangleMesh repeated = tetrahedron();
    repeated.faces[0] = {0, 0, 2};
    CHECK_THROWS_AS(validate(repeated), MeshError);

    TriangleMesh unused = tetrahedron();
    unused.vertices.push_back({5, 5, 5});
    CHECK_THROWS_AS(validate(unused), MeshError);

    TriangleMesh nan = tetrahedron();
    nan.vertices[2][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(nan), MeshError);
}

TEST_CASE("positions round-trip through with_positions") {
    const TriangleMesh m = tetrahedron();
    Vector phi = positions(m);
    REQUIRE(phi.size() == 12);
    CHECK(phi[3] == 1.0);
    CHECK(phi[5] == -1.0);
    phi[0] = 7.0;
    const TriangleMesh moved = with_positions(m, phi);
    CHECK(moved.vertices[0][0] == 7.0);
    CHECK(moved.faces == m.faces);
    CHECK_THROWS_AS((void)with_positions(m, std::span<const double>(phi).first(6)), std::invalid_argument);
}

TEST_CASE("bounding box diagonal") {
    const Vector phi{0, 0, 0, 3, 4, 0, 1, 1, 12};
    CHECK(bounding_box_diagonal(phi) == doctest::Approx(13.0));
}

TEST_CASE("unique edges and neighbour sets") {
    const TriangleMesh ico = make_icosphere(2);
    const auto edges = unique_edges(ico);
    CHECK(edges.size() == 3 * ico.num_faces() / 2);
    CHECK(std::is_sorted(edges.begin(), edges.end()));
    for (const auto& e : edges) CHECK(e[0] < e[1]);

    const auto nb = vertex_neighbors(tetrahedron());
    for (std::size_t v = 0; v < 4; ++v) CHECK(nb[v].size() == 3);
    CHECK(nb[0] == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("face_cross is twice the area along the outward normal") {
    const Vector phi{0, 0, 0, 2, 0, 0, 0, 3, 0};
    const Vec3 c = face_cross(phi, {0, 1, 2});
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == doctest::Approx(6.0));
}

TEST_CASE("tetrahedron adjacency") {
    const auto adj = build_adjacency(tetrahedron());
    REQUIRE(adj.size() == 4);
    CHECK(adj.closed());
    for (VertexId v = 0; v < 4; ++v) {
        CHECK(adj.degree(v) == 3);
        CHECK(adj.incident_faces[static_cast<std::size_t>(v)].size() == 3);
        CHECK_FALSE(adj.is_boundary(v));
    }
}

TEST_CASE("1-rings run counter-clockwise with respect to face winding") {
    const TriangleMesh m = make_icosphere(2);
    const auto adj = build_adjacency(m);
    for (const Face& f : m.faces) {
        for (int k = 0; k < 3; ++k) {
            const VertexId v = f[k];
            const VertexId b = f[(k + 1) % 3];
            const VertexId c = f[(k + 2) % 3];
            CHECK(cyclic_gap(adj.neighbors[static_cast<std::size_t>(v)], b, c) == 1);
        }
    }
}

TEST_CASE("icosphere degrees") {
    const auto adj = build_adjacency(make_icosphere(3));
    std::map<std::size_t, int> counts;
    for (VertexId v = 0; v < static_cast<VertexId>(adj.size()); ++v) ++counts[adj.degree(v)];
    CHECK(counts[5] == 12);
    CHECK(counts[6] == static_cast<int>(adj.size()) - 12);
}

TEST_CASE("non-manifold and mis-wound meshes are rejected") {
    TriangleMesh fin = tetrahedron();
    fin.vertices.push_back({0, 0, 3});
    fin.faces.push_back({0, 1, 4});
    CHECK_THROWS_AS((void)build_adjacency(fin), MeshError);

    TriangleMesh flipped = tetrahedron();
    std::swap(flipped.faces[0][1], flipped.faces[0][2]);
    CHECK_THROWS_AS((void)build_adjacency(flipped), MeshError);
}

TEST_CASE("open fans: rejected by default, pinned on request") {
    const TriangleMesh plane = make_plane(5, 5);
    CHECK_THROWS_AS((void)build_adjacency(plane), MeshError);
    const auto adj = build_adjacency(plane, BoundaryPolicy::pin);
    CHECK_FALSE(adj.closed());
    int interior = 0;
    for (VertexId v = 0; v < static_cast<VertexId>(adj.size()); ++v) {
        if (!adj.is_boundary(v)) {
            ++interior;
            CHECK(adj.degree(v) == 6);
        }
    }
    CHECK(interior == 9);
}

TEST_CASE("pinned boundary rings are ordered from the open end") {
    const TriangleMesh plane = make_plane(3, 3, 1.0, LatticeKind::split_square);
    const auto adj = build_adjacency(plane, BoundaryPolicy::pin);
    for (const Face& f : plane.faces) {
        for (int k = 0; k < 3; ++k) {
            const auto& ring = adj.neighbors[static_cast<std::size_t>(f[k])];
            const auto ib = std::find(ring.begin(), ring.end(), f[(k + 1) % 3]);
            const auto ic = std::find(ring.begin(), ring.end(), f[(k + 2) % 3]);
            REQUIRE(ib != ring.end());
            REQUIRE(ic != ring.end());
            // On an open fan the successor is never wrapped around.
            if (adj.is_boundary(f[k])) CHECK(ic - ib == 1);
        }
    }
}

TEST_CASE("ring distance") {
    const TriangleMesh m = make_icosphere(2);
    const auto adj = build_adjacency(m);
    const auto d = ring_distance(adj, 0);
    CHECK(d[0] == 0);
    int ring1 = 0;
    for (int x : d) {
        CHECK(x >= 0);
        ring1 += x == 1 ? 1 : 0;
    }
    CHECK(ring1 == static_cast<int>(adj.degree(0)));
    for (VertexId j : adj.neighbors[0]) CHECK(d[static_cast<std::size_t>(j)] == 1);
}
