#include "dasm/solver.hpp"

#include <cmath>
#include <string>

namespace dasm {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericalError(std::string(what) + " contains a non-finite value");
    }
}

void require_same_size(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}

}  // namespace

void SolverConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
    if (k < 0) throw std::invalid_argument("K must be >= 0");
    if (epsilon && !(*epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (max_recursive_steps < 1) throw std::invalid_argument("max_recursive_steps must be >= 1");
    if (!std::isfinite(beta) || !std::isfinite(gamma)) throw std::invalid_argument("beta and gamma must be finite");
    weights.validate();
}

SolverConfig SolverConfig::with_gate_scale(double s) const {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("gate scale must be > 0");
    SolverConfig out = *this;
    out.gamma *= s;
    out.beta /= s;
    return out;
}

double SolverConfig::resolved_epsilon(std::span<const double> phi) const {
    return epsilon.value_or(1e-4 * bounding_box_diagonal(phi));
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
    require_same_size(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Vector explicit_step(std::span<const double> phi, std::span<const double> force, double alpha) {
    require_same_size(phi, force);
    require_finite(force, "force");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    Vector out(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] + force[i] / alpha;
    return out;
}

Vector semi_implicit_step(std::span<const double> phi, std::span<const double> force, const SparseMatrix& a,
                          const SolverConfig& cfg) {
    require_same_size(phi, force);
    if (phi.size() != 3 * static_cast<std::size_t>(a.rows())) throw std::invalid_argument("state does not match A");
    require_finite(force, "force");
    // When A has no entries the series collapses to (alpha phi + F) / alpha;
    // route through explicit_step so the two agree bitwise.
    if (a.nnz() == 0) return explicit_step(phi, force, cfg.alpha);
    Vector rhs(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) rhs[i] = cfg.alpha * phi[i] + force[i];
    return neumann_apply_inverse3(a, cfg.alpha, cfg.k, rhs);
}

SparseMatrix build_B(const SparseMatrix& a, double alpha, int k) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (a.rows() != a.cols()) throw std::invalid_argument("A must be square");
    const SparseMatrix step = scale(a, -1.0 / alpha);
    SparseMatrix b(a.rows(), a.cols());
    SparseMatrix power = SparseMatrix::identity(a.rows());
    for (int n = 1; n <= k; ++n) {
        power = spmul(power, step);
        b = spadd(b, power);
    }
    return b;
}

double gate_sigmoid(double x, double beta, double gamma) {
    const double z = beta * (x - gamma);
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> adaptive_gate(std::span<const double> b_gamma, double beta, double gamma) {
    if (b_gamma.size() % 3 != 0) throw std::invalid_argument("B Gamma must have length 3N");
    std::vector<double> gate(b_gamma.size() / 3);
    for (std::size_t i = 0; i < gate.size(); ++i) gate[i] = gate_sigmoid(norm(get3(b_gamma, i)), beta, gamma);
    return gate;
}

SmoothingOperator::SmoothingOperator(SparseMatrix a, double alpha, int k, bool materialize_b)
    : a_(std::move(a)), alpha_(alpha), k_(k) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (k < 0) throw std::invalid_argument("K must be >= 0");
    if (materialize_b) b_ = build_B(a_, alpha_, k_);
}

SmoothingOperator SmoothingOperator::build(const TriangleMesh& mesh, const VertexAdjacency& adjacency,
                                           const SolverConfig& cfg) {
    cfg.validate();
    const ChartSet charts = build_charts(mesh, adjacency);
    return SmoothingOperator(build_regularizer(mesh, charts, cfg.weights), cfg.alpha, cfg.k, cfg.materialize_b);
}

Vector SmoothingOperator::increment(std::span<const double> gamma) const {
    if (gamma.size() != 3 * static_cast<std::size_t>(a_.rows())) throw std::invalid_argument("state does not match A");
    if (b_) return spmv3(*b_, gamma);
    // (I + B) Gamma is the series applied to alpha Gamma.
    Vector scaled(gamma.begin(), gamma.end());
    for (double& v : scaled) v *= alpha_;
    Vector out = neumann_apply_inverse3(a_, alpha_, k_, scaled);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= gamma[i];
    return out;
}

AdaptiveStepResult adaptive_step(std::span<const double> phi, std::span<const double> force,
                                 const SmoothingOperator& op, const SolverConfig& cfg,
                                 std::optional<std::span<const double>> gate_override) {
    AdaptiveStepResult result;
    result.phi = explicit_step(phi, force, op.alpha());
    const Vector bg = op.increment(result.phi);
    if (gate_override) {
        if (gate_override->size() != bg.size() / 3) throw std::invalid_argument("gate override needs one gain per vertex");
        result.gate.assign(gate_override->begin(), gate_override->end());
    } else {
        result.gate = adaptive_gate(bg, cfg.beta, cfg.gamma);
    }
    for (std::size_t i = 0; i < result.gate.size(); ++i) {
        const double g = result.gate[i];
        for (std::size_t c = 0; c < 3; ++c) result.phi[3 * i + c] += g * bg[3 * i + c];
    }
    return result;
}

Vector smoothing_step(std::span<const double> phi, std::span<const double> force, const SmoothingOperator& op,
                      const SolverConfig& cfg) {
    if (cfg.mode == SmoothingMode::adaptive) return adaptive_step(phi, force, op, cfg).phi;
    if (op.b()) {
        Vector gamma = explicit_step(phi, force, op.alpha());
        const Vector bg = spmv3(*op.b(), gamma);
        for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] += bg[i];
        return gamma;
    }
    SolverConfig local = cfg;
    local.alpha = op.alpha();
    local.k = op.k();
    return semi_implicit_step(phi, force, op.a(), local);
}

RecursiveResult recursive_smooth(std::span<const double> phi, const SmoothingOperator& op, const SolverConfig& cfg,
                                 double epsilon, const StepObserver& observer) {
    cfg.validate();
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    RecursiveResult result;
    result.phi.assign(phi.begin(), phi.end());
    const Vector zero(phi.size(), 0.0);
    while (result.steps < cfg.max_recursive_steps) {
        Vector next = smoothing_step(result.phi, zero, op, cfg);
        require_finite(next, "smoothed state");
        result.last_change = l2_distance(next, result.phi);
        result.phi = std::move(next);
        ++result.steps;
        if (observer) observer(result.steps, result.phi);
        if (result.last_change < epsilon) {
            result.converged = true;
            break;
        }
    }
    return result;
}

EvolveResult evolve(const TriangleMesh& mesh, const ForceField& force, const SolverConfig& cfg, int steps,
                    const EvolveOptions& options) {
    cfg.validate();
    if (steps < 0) throw std::invalid_argument("step count must be >= 0");
    const VertexAdjacency adjacency = build_adjacency(mesh);
    std::optional<SmoothingOperator> op = SmoothingOperator::build(mesh, adjacency, cfg);

    EvolveResult result;
    result.trajectory.push_back(positions(mesh));
    const double epsilon = cfg.resolved_epsilon(result.trajectory.front());
    for (int t = 1; t <= steps; ++t) {
        const Vector& prev = result.trajectory.back();
        if (cfg.rebuild_operators && t > 1) {
            op.emplace(SmoothingOperator::build(with_positions(mesh, prev), adjacency, cfg));
        }
        const Vector f = force(mesh, prev);
        if (f.size() != prev.size()) throw std::invalid_argument("force field returned a vector of the wrong size");
        Vector next = smoothing_step(prev, f, *op, cfg);
        if (cfg.recursive) {
            RecursiveResult r = recursive_smooth(next, *op, cfg, epsilon);
            result.smoothing_steps += r.steps;
            next = std::move(r.phi);
        }
        require_finite(next, "evolved state");
        const double moved = l2_distance(next, prev);
        result.trajectory.push_back(std::move(next));
        if (options.on_step) options.on_step(t, result.trajectory.back());
        if (options.stop_when_stationary && moved < epsilon) {
            result.stopped_early = true;
            break;
        }
    }
    return result;
}

}  // namespace dasm
