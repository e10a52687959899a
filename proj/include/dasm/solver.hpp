#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dasm/chart.hpp"
#include "dasm/mesh.hpp"
#include "dasm/operators.hpp"
#include "dasm/sparse.hpp"

namespace dasm {

/// Non-finite force or state.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SmoothingMode { uniform, adaptive };

/// Membrane weights giving rho(A) ~ 0.6 on uniform charts, so the K = 4
/// series converges at alpha = 1.
inline constexpr RegularizerWeights kDefaultWeights{0.025, 0.025, 0.0, 0.0, 0.0};

struct SolverConfig {
    double alpha = 1.0;  ///< inverse step size
    int k = 4;           ///< Neumann truncation order
    double beta = 6000.0;  ///< gate steepness
    double gamma = 15.0;   ///< gate midpoint, in |B Gamma| units (scale dependent)
    std::optional<double> epsilon;  ///< recursive stop threshold; default 1e-4 * bbox diagonal
    int max_recursive_steps = 20;
    SmoothingMode mode = SmoothingMode::uniform;
    RegularizerWeights weights = kDefaultWeights;
    bool recursive = false;          ///< smooth to a fixed point after each gradient update
    bool rebuild_operators = false;  ///< rebuild charts and A every outer step
    bool materialize_b = false;      ///< form B explicitly instead of applying the series

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    /// Moves the gate to a unit system `s` times the default one:
    /// gamma *= s, beta /= s, so beta * gamma is unchanged.
    [[nodiscard]] SolverConfig with_gate_scale(double s) const;
    [[nodiscard]] double resolved_epsilon(std::span<const double> phi) const;
};

/// Gamma = phi + force / alpha.
[[nodiscard]] Vector explicit_step(std::span<const double> phi, std::span<const double> force, double alpha);

/// (A + alpha I)^-1 (alpha phi + force) through the truncated series.
[[nodiscard]] Vector semi_implicit_step(std::span<const double> phi, std::span<const double> force,
                                        const SparseMatrix& a, const SolverConfig& cfg);

/// B = sum_{n=1..K} (-1)^n alpha^-n A^n, so (I + B) x == series(alpha x).
[[nodiscard]] SparseMatrix build_B(const SparseMatrix& a, double alpha, int k);

/// Logistic 1 / (1 + exp(-beta (x - gamma))) without overflow.
[[nodiscard]] double gate_sigmoid(double x, double beta, double gamma);

/// Per-vertex gains from the norm of each vertex's 3-vector in B Gamma.
[[nodiscard]] std::vector<double> adaptive_gate(std::span<const double> b_gamma, double beta, double gamma);

/// Regularizer plus (optionally) the explicit B, shared across steps.
class SmoothingOperator {
public:
    SmoothingOperator(SparseMatrix a, double alpha, int k, bool materialize_b);

    static SmoothingOperator build(const TriangleMesh& mesh, const VertexAdjacency& adjacency, const SolverConfig& cfg);

    [[nodiscard]] const SparseMatrix& a() const { return a_; }
    [[nodiscard]] const std::optional<SparseMatrix>& b() const { return b_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] int k() const { return k_; }

    /// B Gamma.
    [[nodiscard]] Vector increment(std::span<const double> gamma) const;

private:
    SparseMatrix a_;
    std::optional<SparseMatrix> b_;
    double alpha_;
    int k_;
};

struct AdaptiveStepResult {
    Vector phi;
    std::vector<double> gate;
};

/// Gamma = phi + force/alpha; phi' = Gamma + Lambda B Gamma. `gate_override`
/// replaces the sigmoid gains (one per vertex).
[[nodiscard]] AdaptiveStepResult adaptive_step(std::span<const double> phi, std::span<const double> force,
                                               const SmoothingOperator& op, const SolverConfig& cfg,
                                               std::optional<std::span<const double>> gate_override = std::nullopt);

/// One step of the configured mode.
[[nodiscard]] Vector smoothing_step(std::span<const double> phi, std::span<const double> force,
                                    const SmoothingOperator& op, const SolverConfig& cfg);

struct RecursiveResult {
    Vector phi;
    int steps = 0;
    double last_change = 0.0;  ///< ||phi_t - phi_{t-1}||_2 at the final step
    bool converged = false;    ///< false when max_recursive_steps was hit first
};

using StepObserver = std::function<void(int step, std::span<const double> phi)>;

/// Zero-force steps until ||phi_t - phi_{t-1}|| < epsilon or the step cap.
/// `epsilon` overrides cfg.epsilon when given.
[[nodiscard]] RecursiveResult recursive_smooth(std::span<const double> phi, const SmoothingOperator& op,
                                               const SolverConfig& cfg, double epsilon,
                                               const StepObserver& observer = {});

/// F = -grad E_data at the given positions.
using ForceField = std::function<Vector(const TriangleMesh& topology, std::span<const double> phi)>;

struct EvolveOptions {
    bool stop_when_stationary = false;  ///< stop once an outer step moves less than epsilon
    StepObserver on_step;
};

struct EvolveResult {
    std::vector<Vector> trajectory;  ///< phi^0 .. phi^T
    int smoothing_steps = 0;         ///< extra recursive steps taken in total
    bool stopped_early = false;
};

/// T outer iterations: force evaluation, configured implicit/adaptive step,
/// then recursive smoothing when cfg.recursive is set. Requires a closed mesh.
[[nodiscard]] EvolveResult evolve(const TriangleMesh& mesh, const ForceField& force, const SolverConfig& cfg, int steps,
                                  const EvolveOptions& options = {});

[[nodiscard]] double l2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace dasm
