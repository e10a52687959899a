#include <doctest.h>

#include "dasm/spatial.hpp"
#include "support.hpp"

using namespace dasm;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return pts;
}

Neighbor brute(const std::vector<Vec3>& pts, const Vec3& q) {
    Neighbor best{0, norm2(pts[0] - q)};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = norm2(pts[i] - q);
        if (d < best.dist2) best = {static_cast<std::int32_t>(i), d};
    }
    return best;
}

}  // namespace

TEST_CASE("k-d tree agrees with brute force") {
    for (std::size_t n : {1u, 2u, 7u, 100u, 2000u}) {
        const auto pts = random_points(n, n);
        const KdTree tree(pts);
        CHECK(tree.size() == n);
        for (const Vec3& q : random_points(300, n + 1)) {
            const Neighbor a = tree.nearest(q);
            const Neighbor b = brute(pts, q);
            CHECK(a.index == b.index);
            CHECK(a.dist2 == b.dist2);
        }
    }
}

TEST_CASE("ties resolve to the lowest index") {
    std::vector<Vec3> pts{{1, 0, 0}, {0, 0, 0}, {-1, 0, 0}, {0, 0, 0}, {0, 1, 0}};
    const KdTree tree(pts);
    CHECK(tree.nearest({0, 0, 0}).index == 1);
    CHECK(tree.nearest({0.5, 0, 0}).index == 0);
    CHECK(tree.nearest({-0.5, 0, 0}).index == 1);

    std::vector<Vec3> grid;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k) grid.push_back({double(i), double(j), double(k)});
    const KdTree gtree(grid);
    for (const Vec3& q : random_points(200, 3)) {
        const Vec3 h{std::round(q[0] * 2.5 + 2.5) + 0.5, std::round(q[1] * 2.5 + 2.5), std::round(q[2] * 2.5 + 2.5)};
        CHECK(gtree.nearest(h).index == brute(grid, h).index);
    }
}

TEST_CASE("batch queries and empty trees") {
    const auto pts = random_points(500, 9);
    const KdTree tree(pts);
    const auto qs = random_points(1000, 10);
    const auto serial = nearest_all(tree, qs, Execution::serial);
    const auto parallel = nearest_all(tree, qs, Execution::parallel);
    REQUIRE(serial.size() == qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        CHECK(serial[i].index == parallel[i].index);
        CHECK(serial[i].index == brute(pts, qs[i]).index);
    }
    const KdTree empty;
    CHECK_THROWS_AS((void)empty.nearest({0, 0, 0}), std::logic_error);
}
