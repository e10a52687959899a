#include <doctest.h>

#include <omp.h>

#include "dasm/operators.hpp"
#include "dasm/shapes.hpp"
#include "dasm/solver.hpp"
#include "dasm/spatial.hpp"
#include "support.hpp"

using namespace dasm;

namespace {

struct Threads {
    explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
    int saved;
};

}  // namespace

TEST_CASE("assembly is identical serially, in parallel and across thread counts") {
    const TriangleMesh m = make_fibonacci_sphere(3000);
    const ChartSet charts = build_charts(m, build_adjacency(m));
    const RegularizerWeights w{0.1, 0.2, 0.05, 0.01, 0.02};
    const SparseMatrix reference = build_regularizer(m, charts, w, Execution::serial);
    for (int n : {1, 2, 3, 8}) {
        Threads t(n);
        CHECK(build_regularizer(m, charts, w, Execution::parallel) == reference);
        CHECK(build_regularizer(m, charts, w, Execution::parallel) == build_regularizer(m, charts, w));
    }
}

TEST_CASE("kernels are bitwise identical across execution modes") {
    const TriangleMesh m = test::random_closed_mesh(2000, 1);
    const ChartSet charts = build_charts(m, build_adjacency(m));
    const SparseMatrix a = build_regularizer(m, charts, {0.1, 0.1, 0.02, 0.01, 0.01});
    const Vector x = test::random_vector(m.num_vertices(), 2);
    const Vector phi = test::random_vector(3 * m.num_vertices(), 3);
    for (int n : {2, 4, 7}) {
        Threads t(n);
        CHECK(spmv(a, x, Execution::serial) == spmv(a, x, Execution::parallel));
        CHECK(spmv3(a, phi, Execution::serial) == spmv3(a, phi, Execution::parallel));
        CHECK(spmul(a, a, Execution::serial) == spmul(a, a, Execution::parallel));
        CHECK(neumann_apply_inverse3(a, 1.0, 4, phi, Execution::serial) ==
              neumann_apply_inverse3(a, 1.0, 4, phi, Execution::parallel));

        Vector ys(x.size()), yp(x.size());
        kernels::spmv_serial(a, x, ys);
        kernels::spmv_parallel(a, x, yp);
        CHECK(ys == yp);
        CHECK(kernels::spmul_serial(a, a) == kernels::spmul_parallel(a, a));
    }
}

TEST_CASE("nearest-neighbour batches do not depend on the thread count") {
    std::vector<Vec3> pts, qs;
    Rng rng(4);
    for (int i = 0; i < 5000; ++i) pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    for (int i = 0; i < 5000; ++i) qs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const KdTree tree(pts);
    const auto ref = nearest_all(tree, qs, Execution::serial);
    for (int n : {2, 5}) {
        Threads t(n);
        const auto got = nearest_all(tree, qs);
        for (std::size_t i = 0; i < qs.size(); ++i) CHECK(got[i].index == ref[i].index);
    }
}

TEST_CASE("smoothing trajectories do not depend on the thread count") {
    const TriangleMesh m = add_noise(make_icosphere(3), 0.05, 5);
    const SolverConfig cfg;
    const SmoothingOperator op = SmoothingOperator::build(m, build_adjacency(m), cfg);
    Vector ref;
    {
        Threads t(1);
        ref = recursive_smooth(positions(m), op, cfg, 1e-9).phi;
    }
    Threads t(6);
    CHECK(recursive_smooth(positions(m), op, cfg, 1e-9).phi == ref);
}
