// Row-parallel sparse kernels. Every row is reduced in the same order by the
// serial and OpenMP variants, so results match bit for bit.
#include <algorithm>
#include <vector>

#include "dasm/sparse.hpp"

namespace dasm::kernels {

namespace {

inline double row_dot(const SparseMatrix& m, std::int32_t i, std::span<const double> x) {
    const auto c = m.row_cols(i);
    const auto v = m.row_values(i);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * x[static_cast<std::size_t>(c[k])];
    return s;
}

inline void row_dot3(const SparseMatrix& m, std::int32_t i, std::span<const double> x, std::span<double> y) {
    const auto c = m.row_cols(i);
    const auto v = m.row_values(i);
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::size_t j = 3 * static_cast<std::size_t>(c[k]);
        sx += v[k] * x[j];
        sy += v[k] * x[j + 1];
        sz += v[k] * x[j + 2];
    }
    const std::size_t o = 3 * static_cast<std::size_t>(i);
    y[o] = sx;
    y[o + 1] = sy;
    y[o + 2] = sz;
}

// Gustavson row product with a dense scatter buffer.
struct RowAccumulator {
    std::vector<double> acc;
    std::vector<std::int32_t> mark;
    std::vector<std::int32_t> touched;

    explicit RowAccumulator(std::int32_t cols)
        : acc(static_cast<std::size_t>(cols), 0.0), mark(static_cast<std::size_t>(cols), -1) {}

    std::vector<std::pair<std::int32_t, double>> row(const SparseMatrix& a, const SparseMatrix& b, std::int32_t i) {
        touched.clear();
        const auto ac = a.row_cols(i);
        const auto av = a.row_values(i);
        for (std::size_t p = 0; p < ac.size(); ++p) {
            const auto bc = b.row_cols(ac[p]);
            const auto bv = b.row_values(ac[p]);
            for (std::size_t q = 0; q < bc.size(); ++q) {
                const auto j = static_cast<std::size_t>(bc[q]);
                if (mark[j] != i) {
                    mark[j] = i;
                    acc[j] = 0.0;
                    touched.push_back(bc[q]);
                }
                acc[j] += av[p] * bv[q];
            }
        }
        std::sort(touched.begin(), touched.end());
        std::vector<std::pair<std::int32_t, double>> out;
        out.reserve(touched.size());
        for (std::int32_t j : touched) out.emplace_back(j, acc[static_cast<std::size_t>(j)]);
        return out;
    }
};

}  // namespace

void spmv_serial(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
    for (std::int32_t i = 0; i < m.rows(); ++i) y[static_cast<std::size_t>(i)] = row_dot(m, i, x);
}

void spmv_parallel(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
    const std::int32_t n = m.rows();
#pragma omp parallel for schedule(static)
    for (std::int32_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = row_dot(m, i, x);
}

void spmv3_serial(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
    for (std::int32_t i = 0; i < m.rows(); ++i) row_dot3(m, i, x, y);
}

void spmv3_parallel(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
    const std::int32_t n = m.rows();
#pragma omp parallel for schedule(static)
    for (std::int32_t i = 0; i < n; ++i) row_dot3(m, i, x, y);
}

SparseMatrix spmul_serial(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(a.rows()));
    RowAccumulator acc(b.cols());
    for (std::int32_t i = 0; i < a.rows(); ++i) rows[static_cast<std::size_t>(i)] = acc.row(a, b, i);
    return SparseMatrix::from_rows(b.cols(), std::move(rows));
}

SparseMatrix spmul_parallel(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(a.rows()));
    const std::int32_t n = a.rows();
#pragma omp parallel
    {
        RowAccumulator acc(b.cols());
#pragma omp for schedule(dynamic, 64)
        for (std::int32_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = acc.row(a, b, i);
    }
    return SparseMatrix::from_rows(b.cols(), std::move(rows));
}

}  // namespace dasm::kernels
