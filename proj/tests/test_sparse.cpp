#include <doctest.h>

#include <Eigen/Dense>

#include "dasm/sparse.hpp"
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

SparseMatrix random_sparse(std::int32_t rows, std::int32_t cols, double density, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Triplet> t;
    for (std::int32_t i = 0; i < rows; ++i)
        for (std::int32_t j = 0; j < cols; ++j)
            if (rng.uniform() < density) t.push_back({i, j, rng.uniform(-1.0, 1.0)});
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

Eigen::VectorXd as_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("triplet assembly sums, sorts and prunes") {
    const SparseMatrix m = SparseMatrix::from_triplets(
        3, 4, {{2, 3, 1.0}, {0, 1, 2.0}, {0, 1, 0.5}, {1, 0, 1e-16}, {2, 0, -1.0}, {1, 2, 1.0}, {1, 2, -1.0}});
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    CHECK(m.nnz() == 3);
    CHECK(m.coeff(0, 1) == 2.5);
    CHECK(m.coeff(1, 0) == 0.0);
    CHECK(m.coeff(1, 2) == 0.0);
    CHECK(m.coeff(2, 0) == -1.0);
    CHECK(m.row_cols(2)[0] == 0);
    CHECK(m.row_cols(2)[1] == 3);
    CHECK(m.row_ptr().back() == 3);
    CHECK_THROWS_AS((void)SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
    CHECK_THROWS_AS((void)SparseMatrix::from_triplets(2, 2, {{0, -1, 1.0}}), std::out_of_range);
}

TEST_CASE("row assembly matches triplet assembly") {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows{{{3, 1.0}, {0, 2.0}, {3, 1.0}}, {}, {{1, -4.0}}};
    const SparseMatrix a = SparseMatrix::from_rows(4, rows);
    const SparseMatrix b = SparseMatrix::from_triplets(3, 4, {{0, 0, 2.0}, {0, 3, 2.0}, {2, 1, -4.0}});
    CHECK(a == b);
}

TEST_CASE("identity") {
    const SparseMatrix i = SparseMatrix::identity(5);
    CHECK(dense(i) == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("spmv and spmv3 against a dense oracle") {
    const SparseMatrix m = random_sparse(37, 29, 0.2, 1);
    const Vector x = test::random_vector(29, 2);
    const Eigen::VectorXd ref = dense(m) * as_eigen(x);
    CHECK((as_eigen(spmv(m, x)) - ref).lpNorm<Eigen::Infinity>() < 1e-13);

    const SparseMatrix sq = random_sparse(20, 20, 0.3, 3);
    const Vector phi = test::random_vector(60, 4);
    const Vector y = spmv3(sq, phi);
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd xc(20);
        for (int i = 0; i < 20; ++i) xc(i) = phi[3 * i + c];
        const Eigen::VectorXd yc = dense(sq) * xc;
        for (int i = 0; i < 20; ++i) CHECK(y[3 * i + c] == doctest::Approx(yc(i)).epsilon(1e-13));
    }
    CHECK_THROWS_AS((void)spmv(m, test::random_vector(5, 1)), std::invalid_argument);
    CHECK_THROWS_AS((void)spmv3(sq, test::random_vector(20, 1)), std::invalid_argument);
}

TEST_CASE("spadd, scale, transpose and spmul against dense oracles") {
    const SparseMatrix a = random_sparse(15, 12, 0.25, 5);
    const SparseMatrix b = random_sparse(15, 12, 0.25, 6);
    const SparseMatrix c = random_sparse(12, 18, 0.25, 7);
    CHECK((dense(spadd(a, b, 2.0, -0.5)) - (2.0 * dense(a) - 0.5 * dense(b))).norm() < 1e-13);
    CHECK((dense(scale(a, -3.0)) - (-3.0 * dense(a))).norm() < 1e-13);
    CHECK(dense(transpose(a)) == dense(a).transpose());
    CHECK((dense(spmul(a, c)) - dense(a) * dense(c)).norm() < 1e-12);
    CHECK(spadd(a, a, 1.0, -1.0).nnz() == 0);
    CHECK_THROWS_AS((void)spadd(a, c), std::invalid_argument);
    CHECK_THROWS_AS((void)spmul(a, b), std::invalid_argument);
}

TEST_CASE("products keep columns sorted and unique") {
    const SparseMatrix a = random_sparse(40, 40, 0.1, 8);
    const SparseMatrix p = spmul(a, a);
    for (std::int32_t i = 0; i < p.rows(); ++i) {
        const auto cols = p.row_cols(i);
        for (std::size_t k = 1; k < cols.size(); ++k) CHECK(cols[k - 1] < cols[k]);
    }
}

TEST_CASE("MatrixMarket round-trip") {
    const auto dir = test::scratch_dir("sparse_mm");
    const SparseMatrix a = random_sparse(9, 11, 0.3, 9);
    write_matrix_market(a, dir / "a.mtx");
    CHECK(read_matrix_market(dir / "a.mtx") == a);
    CHECK_THROWS((void)read_matrix_market(dir / "missing.mtx"));
}
