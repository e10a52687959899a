#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dasm/vec3.hpp"

namespace dasm {

/// Serial kernels are the reference; parallel ones use OpenMP over rows and
/// produce bitwise-identical results.
enum class Execution { serial, parallel };

struct Triplet {
    std::int32_t row;
    std::int32_t col;
    double value;
};

/// Entries with |value| below this are dropped after assembly and algebra.
inline constexpr double kPruneTolerance = 1e-14;

/// Row-compressed real matrix with sorted, duplicate-free column indices.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::int32_t rows, std::int32_t cols);

    /// Sums duplicates, sorts columns and prunes near-zeros.
    static SparseMatrix from_triplets(std::int32_t rows, std::int32_t cols, std::vector<Triplet> triplets);
    /// Takes ownership of per-row (col, value) lists; same normalisation.
    static SparseMatrix from_rows(std::int32_t cols, std::vector<std::vector<std::pair<std::int32_t, double>>> rows);
    static SparseMatrix identity(std::int32_t n);

    [[nodiscard]] std::int32_t rows() const { return rows_; }
    [[nodiscard]] std::int32_t cols() const { return cols_; }
    [[nodiscard]] std::size_t nnz() const { return values_.size(); }

    [[nodiscard]] std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
    [[nodiscard]] std::span<const std::int32_t> col_index() const { return col_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    [[nodiscard]] std::span<const std::int32_t> row_cols(std::int32_t i) const;
    [[nodiscard]] std::span<const double> row_values(std::int32_t i) const;

    /// Stored value or 0.
    [[nodiscard]] double coeff(std::int32_t i, std::int32_t j) const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::int32_t rows_ = 0;
    std::int32_t cols_ = 0;
    std::vector<std::int64_t> row_ptr_{0};
    std::vector<std::int32_t> col_;
    std::vector<double> values_;
};

/// y = M x
[[nodiscard]] Vector spmv(const SparseMatrix& m, std::span<const double> x, Execution exec = Execution::parallel);

/// Applies the N x N matrix to each coordinate channel of a 3N vector.
[[nodiscard]] Vector spmv3(const SparseMatrix& m, std::span<const double> phi, Execution exec = Execution::parallel);

/// a*A + b*B
[[nodiscard]] SparseMatrix spadd(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// A * B
[[nodiscard]] SparseMatrix spmul(const SparseMatrix& a, const SparseMatrix& b, Execution exec = Execution::parallel);
[[nodiscard]] SparseMatrix scale(const SparseMatrix& a, double s);
[[nodiscard]] SparseMatrix transpose(const SparseMatrix& a);

/// `%%MatrixMarket matrix coordinate real general`, 1-based.
void write_matrix_market(const SparseMatrix& m, const std::filesystem::path& path);
[[nodiscard]] SparseMatrix read_matrix_market(const std::filesystem::path& path);

namespace kernels {

void spmv_serial(const SparseMatrix& m, std::span<const double> x, std::span<double> y);
void spmv_parallel(const SparseMatrix& m, std::span<const double> x, std::span<double> y);
void spmv3_serial(const SparseMatrix& m, std::span<const double> x, std::span<double> y);
void spmv3_parallel(const SparseMatrix& m, std::span<const double> x, std::span<double> y);

SparseMatrix spmul_serial(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix spmul_parallel(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace kernels

}  // namespace dasm
