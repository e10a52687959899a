#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "dasm/shapes.hpp"
#include "dasm/solver.hpp"
#include "support.hpp"

using namespace dasm;

namespace {

Eigen::MatrixXd dense(const SparseMatrix& m) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (std::int32_t i = 0; i < m.rows(); ++i) {
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
}

struct Fixture {
    TriangleMesh mesh = test::random_closed_mesh(60, 21);
    VertexAdjacency adj = build_adjacency(mesh);
    SolverConfig cfg;
    Vector phi = positions(mesh);
    Vector force = test::random_vector(phi.size(), 22, -0.1, 0.1);
};

}  // namespace

TEST_CASE("config validation and gate scaling") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    SolverConfig bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.k = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.max_recursive_steps = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.weights.w20 = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const SolverConfig scaled = cfg.with_gate_scale(0.01);
    CHECK(scaled.gamma == doctest::Approx(0.15));
    CHECK(scaled.beta == doctest::Approx(600000.0));
    CHECK(scaled.beta * scaled.gamma == doctest::Approx(cfg.beta * cfg.gamma));
    CHECK_THROWS_AS((void)cfg.with_gate_scale(0.0), std::invalid_argument);

    const Vector phi{0, 0, 0, 3, 4, 0};
    CHECK(cfg.resolved_epsilon(phi) == doctest::Approx(5e-4));
    cfg.epsilon = 0.25;
    CHECK(cfg.resolved_epsilon(phi) == 0.25);
}

TEST_CASE("explicit step") {
    const Vector phi{1, 2, 3};
    const Vector f{2, 0, -4};
    CHECK(explicit_step(phi, f, 2.0) == Vector{2, 2, 1});
    const Vector nan{0, std::numeric_limits<double>::quiet_NaN(), 0};
    CHECK_THROWS_AS((void)explicit_step(phi, nan, 1.0), NumericalError);
    CHECK_THROWS_AS((void)explicit_step(phi, Vector{1, 2}, 1.0), std::invalid_argument);
}

TEST_CASE("semi-implicit step with empty A is the explicit step, bitwise") {
    Fixture fx;
    const SparseMatrix empty(static_cast<std::int32_t>(fx.mesh.num_vertices()),
                             static_cast<std::int32_t>(fx.mesh.num_vertices()));
    for (double alpha : {0.3, 1.0, 7.0}) {
        fx.cfg.alpha = alpha;
        CHECK(semi_implicit_step(fx.phi, fx.force, empty, fx.cfg) == explicit_step(fx.phi, fx.force, alpha));
    }
}

TEST_CASE("semi-implicit step approaches the dense implicit solve as K grows") {
    Fixture fx;
    const SparseMatrix a = build_regularizer(fx.mesh, build_charts(fx.mesh, fx.adj), kDefaultWeights);
    const Eigen::MatrixXd M = dense(a) + Eigen::MatrixXd::Identity(a.rows(), a.rows());
    fx.cfg.k = 40;
    const Vector y = semi_implicit_step(fx.phi, fx.force, a, fx.cfg);
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd rhs(a.rows());
        for (int i = 0; i < a.rows(); ++i) rhs(i) = fx.phi[3 * i + c] + fx.force[3 * i + c];
        const Eigen::VectorXd exact = M.partialPivLu().solve(rhs);
        for (int i = 0; i < a.rows(); ++i) CHECK(y[3 * i + c] == doctest::Approx(exact(i)).epsilon(1e-9));
    }
}

TEST_CASE("B matches its dense power sum and the series identity") {
    Fixture fx;
    const SparseMatrix a = build_regularizer(fx.mesh, build_charts(fx.mesh, fx.adj), {0.1, 0.1, 0.0, 0.01, 0.0});
    const double alpha = 1.7;
    const int k = 4;
    const SparseMatrix b = build_B(a, alpha, k);
    const Eigen::MatrixXd step = -dense(a) / alpha;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(a.rows(), a.rows());
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.rows());
    for (int n = 1; n <= k; ++n) {
        power = power * step;
        expected += power;
    }
    CHECK((dense(b) - expected).lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + expected.lpNorm<Eigen::Infinity>()));

    const Vector x = test::random_vector(static_cast<std::size_t>(a.rows()), 23);
    Vector ax = x;
    for (double& v : ax) v *= alpha;
    const Vector series = neumann_apply_inverse(a, alpha, k, ax);
    const Vector bx = spmv(b, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] + bx[i] == doctest::Approx(series[i]).epsilon(1e-11));
    CHECK(build_B(a, alpha, 0).nnz() == 0);
}

TEST_CASE("materialised and applied B give the same increment") {
    Fixture fx;
    fx.cfg.weights = {0.05, 0.05, 0.0, 0.002, 0.002};
    const SmoothingOperator lazy = SmoothingOperator::build(fx.mesh, fx.adj, fx.cfg);
    fx.cfg.materialize_b = true;
    const SmoothingOperator eager = SmoothingOperator::build(fx.mesh, fx.adj, fx.cfg);
    REQUIRE(eager.b().has_value());
    CHECK_FALSE(lazy.b().has_value());
    CHECK(test::max_abs_diff(lazy.increment(fx.phi), eager.increment(fx.phi)) < 1e-12);
    CHECK(test::max_abs_diff(smoothing_step(fx.phi, fx.force, lazy, fx.cfg),
                             smoothing_step(fx.phi, fx.force, eager, fx.cfg)) < 1e-12);
}

TEST_CASE("gate sigmoid") {
    CHECK(gate_sigmoid(15.0, 6000.0, 15.0) == 0.5);
    CHECK(gate_sigmoid(16.0, 6000.0, 15.0) == 1.0);
    CHECK(gate_sigmoid(0.0, 6000.0, 15.0) == 0.0);
    CHECK(gate_sigmoid(1.0, 2.0, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
    for (double x : {-1e300, -1e9, 0.0, 1e9, 1e300}) {
        const double g = gate_sigmoid(x, 1e6, 0.0);
        CHECK(std::isfinite(g));
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
    }
    double prev = -1.0;
    for (double x = -2.0; x <= 2.0; x += 0.01) {
        const double g = gate_sigmoid(x, 3.0, 0.5);
        CHECK(g >= prev);
        prev = g;
    }

    const Vector bg{3, 4, 0, 0, 0, 0};
    const auto gate = adaptive_gate(bg, 10.0, 2.5);
    REQUIRE(gate.size() == 2);
    CHECK(gate[0] == doctest::Approx(gate_sigmoid(5.0, 10.0, 2.5)));
    CHECK(gate[1] == doctest::Approx(gate_sigmoid(0.0, 10.0, 2.5)));
    CHECK_THROWS_AS((void)adaptive_gate(Vector{1, 2}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("adaptive step bounds: all-open gate is the uniform step, closed gate the explicit step") {
    Fixture fx;
    const SmoothingOperator op = SmoothingOperator::build(fx.mesh, fx.adj, fx.cfg);
    const std::vector<double> ones(fx.mesh.num_vertices(), 1.0);
    const std::vector<double> zeros(fx.mesh.num_vertices(), 0.0);
    const auto open = adaptive_step(fx.phi, fx.force, op, fx.cfg, std::span<const double>(ones)).phi;
    const auto closed = adaptive_step(fx.phi, fx.force, op, fx.cfg, std::span<const double>(zeros)).phi;
    CHECK(test::max_abs_diff(open, semi_implicit_step(fx.phi, fx.force, op.a(), fx.cfg)) < 1e-12);
    CHECK(closed == explicit_step(fx.phi, fx.force, fx.cfg.alpha));
    const std::vector<double> wrong(3, 1.0);
    CHECK_THROWS_AS((void)adaptive_step(fx.phi, fx.force, op, fx.cfg, std::span<const double>(wrong)),
                    std::invalid_argument);
}

TEST_CASE("adaptive gate selects by increment magnitude") {
    Fixture fx;
    fx.cfg.mode = SmoothingMode::adaptive;
    const SmoothingOperator op = SmoothingOperator::build(fx.mesh, fx.adj, fx.cfg);
    const Vector zero(fx.phi.size(), 0.0);
    const Vector bg = op.increment(fx.phi);
    std::vector<double> mags(fx.mesh.num_vertices());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = norm(get3(bg, i));
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    fx.cfg.gamma = sorted[sorted.size() / 2];
    fx.cfg.beta = 1e9;
    const auto r = adaptive_step(fx.phi, zero, op, fx.cfg);
    for (std::size_t i = 0; i < mags.size(); ++i) {
        const double moved = norm(get3(r.phi, i) - get3(fx.phi, i));
        if (mags[i] < fx.cfg.gamma * 0.99) CHECK(moved < 1e-12);
        if (mags[i] > fx.cfg.gamma * 1.01) CHECK(moved == doctest::Approx(mags[i]).epsilon(1e-9));
    }
}

TEST_CASE("recursive smoothing stops at epsilon or the cap") {
    Fixture fx;
    const SmoothingOperator op = SmoothingOperator::build(fx.mesh, fx.adj, fx.cfg);
    int seen = 0;
    const auto loose = recursive_smooth(fx.phi, op, fx.cfg, 1e3, [&](int t, std::span<const double>) { seen = t; });
    CHECK(loose.steps == 1);
    CHECK(loose.converged);
    CHECK(seen == 1);

    fx.cfg.max_recursive_steps = 3;
    const auto capped = recursive_smooth(fx.phi, op, fx.cfg, 1e-14);
    CHECK(capped.steps == 3);
    CHECK_FALSE(capped.converged);
    CHECK(capped.last_change > 0.0);
    CHECK_THROWS_AS((void)recursive_smooth(fx.phi, op, fx.cfg, 0.0), std::invalid_argument);
}

TEST_CASE("evolve trajectory bookkeeping") {
    Fixture fx;
    const ForceField none = [](const TriangleMesh&, std::span<const double> p) { return Vector(p.size(), 0.0); };
    const auto r = evolve(fx.mesh, none, fx.cfg, 4);
    CHECK(r.trajectory.size() == 5);
    CHECK(r.trajectory.front() == fx.phi);
    CHECK_FALSE(r.stopped_early);
    CHECK(evolve(fx.mesh, none, fx.cfg, 0).trajectory.size() == 1);

    fx.cfg.mode = SmoothingMode::adaptive;
    EvolveOptions stop;
    stop.stop_when_stationary = true;
    int calls = 0;
    stop.on_step = [&](int, std::span<const double>) { ++calls; };
    const auto still = evolve(fx.mesh, none, fx.cfg, 10, stop);
    CHECK(still.stopped_early);
    CHECK(still.trajectory.size() == 2);
    CHECK(calls == 1);

    const ForceField wrong = [](const TriangleMesh&, std::span<const double>) { return Vector(3, 0.0); };
    CHECK_THROWS_AS((void)evolve(fx.mesh, wrong, fx.cfg, 1), std::invalid_argument);
    const ForceField nan = [](const TriangleMesh&, std::span<const double> p) {
        return Vector(p.size(), std::numeric_limits<double>::quiet_NaN());
    };
    CHECK_THROWS_AS((void)evolve(fx.mesh, nan, fx.cfg, 1), NumericalError);
    CHECK_THROWS_AS((void)evolve(make_plane(4, 4), none, fx.cfg, 1), MeshError);
    CHECK_THROWS_AS((void)evolve(fx.mesh, none, fx.cfg, -1), std::invalid_argument);
}

TEST_CASE("recursive evolve counts smoothing steps") {
    Fixture fx;
    fx.cfg.recursive = true;
    fx.cfg.max_recursive_steps = 2;
    fx.cfg.epsilon = 1e-15;
    const ForceField none = [](const TriangleMesh&, std::span<const double> p) { return Vector(p.size(), 0.0); };
    const auto r = evolve(fx.mesh, none, fx.cfg, 3);
    CHECK(r.smoothing_steps == 6);
}

TEST_CASE("rebuilding operators each step changes nothing for position-free charts") {
    Fixture fx;
    const ForceField pull = [](const TriangleMesh&, std::span<const double> p) {
        Vector f(p.begin(), p.end());
        for (double& v : f) v *= -0.1;
        return f;
    };
    const auto reuse = evolve(fx.mesh, pull, fx.cfg, 3);
    fx.cfg.rebuild_operators = true;
    const auto rebuild = evolve(fx.mesh, pull, fx.cfg, 3);
    CHECK(reuse.trajectory == rebuild.trajectory);
}

TEST_CASE("l2 distance") {
    CHECK(l2_distance(Vector{0, 0}, Vector{3, 4}) == 5.0);
    CHECK_THROWS_AS((void)l2_distance(Vector{0}, Vector{3, 4}), std::invalid_argument);
}
