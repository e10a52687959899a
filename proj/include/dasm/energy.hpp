#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "dasm/chart.hpp"
#include "dasm/metrics.hpp"
#include "dasm/operators.hpp"
#include "dasm/point_cloud.hpp"
#include "dasm/solver.hpp"
#include "dasm/spatial.hpp"

namespace dasm {

/// Pulls every vertex toward its nearest target point: F_i = p*_i - v_i.
class CloudAttraction {
public:
    explicit CloudAttraction(const TargetCloud& target, double gain = 1.0);

    [[nodiscard]] Vector operator()(const TriangleMesh& topology, std::span<const double> phi) const;
    [[nodiscard]] const KdTree& tree() const { return tree_; }

private:
    KdTree tree_;
    double gain_;
};

[[nodiscard]] ForceField cloud_attraction_force(const TargetCloud& target, double gain = 1.0);

struct LossValue {
    double value = 0.0;
    Vector gradient;  ///< d value / d phi, length 3N
};

/// Mean squared edge length.
[[nodiscard]] LossValue edge_length_loss(const TriangleMesh& mesh, std::span<const double> phi);
/// Mean squared umbrella vector |centroid(1-ring) - v|^2.
[[nodiscard]] LossValue laplacian_loss(const TriangleMesh& mesh, std::span<const double> phi);
/// Mean of 1 - n1.n2 over edges shared by two faces. Throws MeshError on a
/// zero-area face.
[[nodiscard]] LossValue normal_consistency_loss(const TriangleMesh& mesh, std::span<const double> phi);

/// Sampled Chamfer distance to `target`; samples ride on `layout`, so the
/// gradient is exact for fixed nearest-neighbour assignments.
[[nodiscard]] LossValue chamfer_loss(const TriangleMesh& mesh, std::span<const double> phi, const SampleLayout& layout,
                                     const TargetCloud& target);
/// 1 - normal_distance, so lower is better. Needs target normals.
[[nodiscard]] LossValue normal_distance_loss(const TriangleMesh& mesh, std::span<const double> phi,
                                             const SampleLayout& layout, const TargetCloud& target);

struct LossWeights {
    double lambda_cf = 1.0;
    double lambda_ndist = 0.0;
    double lambda_edge = 0.0;
    double lambda_lap = 0.0;
    double lambda_ncons = 0.0;
    double lambda_reg = 1.0;  ///< multiplies the three regularisers together
};

struct LossOptions {
    std::size_t sample_count = 5000;
    std::uint64_t seed = 0;
    std::optional<SampleLayout> layout;  ///< overrides sample_count / seed
};

struct LossBreakdown {
    LossValue total;
    double chamfer = 0.0;
    double normal_distance = 0.0;
    double edge = 0.0;
    double laplacian = 0.0;
    double normal_consistency = 0.0;
};

/// lambda_cf Chamfer + lambda_ndist normal distance
///   + lambda_reg (lambda_edge edge + lambda_lap laplacian + lambda_ncons consistency)
[[nodiscard]] LossBreakdown total_loss(const TriangleMesh& mesh, std::span<const double> phi,
                                       const TargetCloud& target, const LossWeights& weights,
                                       const LossOptions& options = {});

/// Negative loss gradient as a force field; the sample layout is redrawn at
/// each call from `seed` and the current positions.
[[nodiscard]] ForceField loss_force(const TargetCloud& target, const LossWeights& weights, LossOptions options);

/// sum_v w10 |Ds phi|^2 + w01 |Dr phi|^2 + 2 w11 |Ds Dr phi|^2 + w20 |Dss phi|^2 + w02 |Drr phi|^2,
/// with Ds, Dr the first-order chart derivatives.
[[nodiscard]] double deformation_energy(const TriangleMesh& mesh, const ChartSet& charts, std::span<const double> phi,
                                        const RegularizerWeights& weights);

}  // namespace dasm
