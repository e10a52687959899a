#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dasm/sparse.hpp"
#include "dasm/vec3.hpp"

namespace dasm {

struct Neighbor {
    std::int32_t index = -1;
    double dist2 = 0.0;
};

/// Exact nearest-neighbour index over a fixed point set. Equidistant
/// candidates resolve to the lowest index.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::vector<Vec3> points);

    [[nodiscard]] Neighbor nearest(const Vec3& query) const;
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] const std::vector<Vec3>& points() const { return points_; }

private:
    struct Node {
        std::int32_t point;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint8_t axis = 0;
    };

    std::int32_t build(std::span<std::int32_t> ids, int depth);
    void search(std::int32_t node, const Vec3& q, Neighbor& best) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

/// Nearest neighbour in `tree` for every query point.
[[nodiscard]] std::vector<Neighbor> nearest_all(const KdTree& tree, std::span<const Vec3> queries,
                                                Execution exec = Execution::parallel);

}  // namespace dasm
