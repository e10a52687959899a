#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dasm/mesh.hpp"
#include "dasm/point_cloud.hpp"
#include "dasm/sparse.hpp"

namespace dasm {

/// Fixed sample placement: face id and barycentric weights per sample.
/// Positions follow the vertices, so a layout can be re-realised after the
/// mesh moves (used for differentiable sampled losses).
struct SampleLayout {
    std::vector<std::int32_t> faces;
    std::vector<std::array<double, 3>> bary;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const { return faces.size(); }
};

/// Area-weighted uniform placement at positions `phi`. Throws MeshError for a
/// zero-area mesh when count > 0.
[[nodiscard]] SampleLayout make_sample_layout(const TriangleMesh& mesh, std::span<const double> phi, std::size_t count,
                                              std::uint64_t seed);

struct SampledSurface {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;  ///< unit face normals, or empty
    std::string source;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

[[nodiscard]] SampledSurface realize_samples(const TriangleMesh& mesh, std::span<const double> phi,
                                             const SampleLayout& layout);
[[nodiscard]] SampledSurface sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);
[[nodiscard]] SampledSurface as_sampled(const TargetCloud& cloud, std::string source = "cloud");
[[nodiscard]] TargetCloud as_cloud(const SampledSurface& s);

/// mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2
[[nodiscard]] double chamfer_distance(const SampledSurface& a, const SampledSurface& b);
/// Mean |cos| between each sample's normal and its nearest neighbour's,
/// averaged over both directions. 1 is best.
[[nodiscard]] double normal_distance(const SampledSurface& a, const SampledSurface& b);
/// F1 score in percent with precision over `a` and recall over `b`.
[[nodiscard]] double f1_at_tau(const SampledSurface& a, const SampledSurface& b, double tau);

struct SurfaceScores {
    double chamfer = 0.0;
    std::optional<double> normal;
    std::vector<std::pair<double, double>> f1;  ///< (tau, score)
};

/// All comparison metrics from one nearest-neighbour pass in each direction.
[[nodiscard]] SurfaceScores compare_surfaces(const SampledSurface& a, const SampledSurface& b,
                                             std::span<const double> taus, Execution exec = Execution::parallel);

[[nodiscard]] double mean_edge_length(const TriangleMesh& mesh, std::span<const double> phi);
/// Mean over vertices of |centroid(1-ring) - vertex|.
[[nodiscard]] double mean_surface_laplacian(const TriangleMesh& mesh, std::span<const double> phi);

}  // namespace dasm
