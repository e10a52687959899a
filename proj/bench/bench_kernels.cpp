#include <benchmark/benchmark.h>

#include <map>

#include "dasm/energy.hpp"
#include "dasm/metrics.hpp"
#include "dasm/shapes.hpp"
#include "dasm/solver.hpp"

using namespace dasm;

namespace {

Execution exec_of(const benchmark::State& state) {
    return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

struct Fixture {
    TriangleMesh mesh;
    VertexAdjacency adjacency;
    ChartSet charts;
    SparseMatrix a;
    Vector phi;

    explicit Fixture(int subdivisions)
        : mesh(add_noise(make_icosphere(subdivisions), 0.02, 1)),
          adjacency(build_adjacency(mesh)),
          charts(build_charts(mesh, adjacency)),
          a(build_regularizer(mesh, charts, kDefaultWeights)),
          phi(positions(mesh)) {}
};

const Fixture& fixture(int subdivisions) {
    static std::map<int, Fixture> cache;
    auto it = cache.find(subdivisions);
    if (it == cache.end()) it = cache.emplace(subdivisions, Fixture(subdivisions)).first;
    return it->second;
}

void args(benchmark::internal::Benchmark* b) {
    for (int s : {4, 5, 6})
        for (int p : {0, 1}) b->Args({s, p});
    b->ArgNames({"subdiv", "parallel"});
}

void BM_spmv3(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(spmv3(f.a, f.phi, exec_of(state)));
    state.counters["nnz"] = static_cast<double>(f.a.nnz());
}
BENCHMARK(BM_spmv3)->Apply(args);

void BM_spmul(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(spmul(f.a, f.a, exec_of(state)));
}
BENCHMARK(BM_spmul)->Apply(args);

void BM_assembly(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_regularizer(f.mesh, f.charts, kDefaultWeights, exec_of(state)));
}
BENCHMARK(BM_assembly)->Apply(args);

void BM_neumann(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(neumann_apply_inverse3(f.a, 1.0, 4, f.phi, exec_of(state)));
}
BENCHMARK(BM_neumann)->Apply(args);

void BM_nearest(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    const KdTree tree(sample_surface(f.mesh, 10000, 2).points);
    for (auto _ : state) benchmark::DoNotOptimize(nearest_all(tree, f.mesh.vertices, exec_of(state)));
}
BENCHMARK(BM_nearest)->Apply(args);

// One outer step at the size used for timing comparisons, operators prebuilt.
void BM_step(benchmark::State& state) {
    const TriangleMesh mesh = add_noise(make_fibonacci_sphere(1534), 0.01, 9);
    const TargetCloud cloud = as_cloud(sample_surface(scale_axes(make_icosphere(4), {1.0, 1.0, 1.5}), 10000, 3));
    const ForceField force = cloud_attraction_force(cloud, 0.5);
    SolverConfig cfg;
    cfg.mode = SmoothingMode::adaptive;
    const SmoothingOperator op = SmoothingOperator::build(mesh, build_adjacency(mesh), cfg);
    const Vector phi = positions(mesh);
    const bool adaptive = state.range(0) == 1;
    for (auto _ : state) {
        const Vector f = force(mesh, phi);
        if (adaptive)
            benchmark::DoNotOptimize(adaptive_step(phi, f, op, cfg));
        else
            benchmark::DoNotOptimize(explicit_step(phi, f, cfg.alpha));
    }
}
BENCHMARK(BM_step)->Arg(0)->Arg(1)->ArgName("adaptive")->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
