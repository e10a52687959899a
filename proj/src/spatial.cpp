#include "dasm/spatial.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dasm {

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    std::vector<std::int32_t> ids(points_.size());
    std::iota(ids.begin(), ids.end(), 0);
    nodes_.reserve(points_.size());
    root_ = build(ids, 0);
}

std::int32_t KdTree::build(std::span<std::int32_t> ids, int depth) {
    if (ids.empty()) return -1;
    const auto axis = static_cast<std::uint8_t>(depth % 3);
    const std::size_t mid = ids.size() / 2;
    std::nth_element(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(mid), ids.end(),
                     [&](std::int32_t a, std::int32_t b) {
                         const double pa = points_[static_cast<std::size_t>(a)][axis];
                         const double pb = points_[static_cast<std::size_t>(b)][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({ids[mid], -1, -1, axis});
    const std::int32_t left = build(ids.subspan(0, mid), depth + 1);
    const std::int32_t right = build(ids.subspan(mid + 1), depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

void KdTree::search(std::int32_t node, const Vec3& q, Neighbor& best) const {
    if (node < 0) return;
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    const Vec3& p = points_[static_cast<std::size_t>(n.point)];
    const double d2 = norm2(p - q);
    if (best.index < 0 || d2 < best.dist2 || (d2 == best.dist2 && n.point < best.index)) {
        best = {n.point, d2};
    }
    const double diff = q[n.axis] - p[n.axis];
    const std::int32_t near = diff < 0 ? n.left : n.right;
    const std::int32_t far = diff < 0 ? n.right : n.left;
    search(near, q, best);
    // <= keeps equidistant candidates on the far side reachable for the
    // lowest-index tie-break.
    if (diff * diff <= best.dist2) search(far, q, best);
}

Neighbor KdTree::nearest(const Vec3& query) const {
    if (points_.empty()) throw std::logic_error("nearest() on an empty KdTree");
    Neighbor best;
    search(root_, query, best);
    return best;
}

std::vector<Neighbor> nearest_all(const KdTree& tree, std::span<const Vec3> queries, Execution exec) {
    std::vector<Neighbor> out(queries.size());
    const auto n = static_cast<std::int64_t>(queries.size());
    if (exec == Execution::serial) {
        for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = tree.nearest(queries[static_cast<std::size_t>(i)]);
    } else {
#pragma omp parallel for schedule(dynamic, 256)
        for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = tree.nearest(queries[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace dasm
