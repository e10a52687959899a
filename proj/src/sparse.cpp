#include "dasm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dasm {

SparseMatrix::SparseMatrix(std::int32_t rows, std::int32_t cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

SparseMatrix SparseMatrix::from_triplets(std::int32_t rows, std::int32_t cols, std::vector<Triplet> triplets) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> per_row(static_cast<std::size_t>(rows));
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::out_of_range("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                    ") outside matrix");
        }
        per_row[static_cast<std::size_t>(t.row)].emplace_back(t.col, t.value);
    }
    return from_rows(cols, std::move(per_row));
}

SparseMatrix SparseMatrix::from_rows(std::int32_t cols,
                                     std::vector<std::vector<std::pair<std::int32_t, double>>> rows) {
    SparseMatrix m(static_cast<std::int32_t>(rows.size()), cols);
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    m.col_.reserve(total);
    m.values_.reserve(total);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        // Stable sort keeps duplicate summation in insertion order.
        std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < r.size();) {
            const std::int32_t c = r[k].first;
            if (c < 0 || c >= cols) throw std::out_of_range("column index outside matrix");
            double v = 0.0;
            for (; k < r.size() && r[k].first == c; ++k) v += r[k].second;
            if (std::abs(v) >= kPruneTolerance) {
                m.col_.push_back(c);
                m.values_.push_back(v);
            }
        }
        m.row_ptr_[i + 1] = static_cast<std::int64_t>(m.col_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(std::int32_t n) {
    SparseMatrix m(n, n);
    m.col_.resize(static_cast<std::size_t>(n));
    m.values_.assign(static_cast<std::size_t>(n), 1.0);
    for (std::int32_t i = 0; i < n; ++i) {
        m.col_[static_cast<std::size_t>(i)] = i;
        m.row_ptr_[static_cast<std::size_t>(i) + 1] = i + 1;
    }
    return m;
}

std::span<const std::int32_t> SparseMatrix::row_cols(std::int32_t i) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
    return std::span<const std::int32_t>(col_).subspan(b, e - b);
}

std::span<const double> SparseMatrix::row_values(std::int32_t i) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
    return std::span<const double>(values_).subspan(b, e - b);
}

double SparseMatrix::coeff(std::int32_t i, std::int32_t j) const {
    const auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

Vector spmv(const SparseMatrix& m, std::span<const double> x, Execution exec) {
    if (x.size() != static_cast<std::size_t>(m.cols())) throw std::invalid_argument("spmv: dimension mismatch");
    Vector y(static_cast<std::size_t>(m.rows()));
    if (exec == Execution::serial) {
        kernels::spmv_serial(m, x, y);
    } else {
        kernels::spmv_parallel(m, x, y);
    }
    return y;
}

Vector spmv3(const SparseMatrix& m, std::span<const double> phi, Execution exec) {
    if (phi.size() != 3 * static_cast<std::size_t>(m.cols())) throw std::invalid_argument("spmv3: dimension mismatch");
    Vector y(3 * static_cast<std::size_t>(m.rows()));
    if (exec == Execution::serial) {
        kernels::spmv3_serial(m, phi, y);
    } else {
        kernels::spmv3_parallel(m, phi, y);
    }
    return y;
}

SparseMatrix spadd(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("spadd: dimension mismatch");
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(a.rows()));
    for (std::int32_t i = 0; i < a.rows(); ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        const auto ac = a.row_cols(i);
        const auto av = a.row_values(i);
        const auto bc = b.row_cols(i);
        const auto bv = b.row_values(i);
        std::size_t p = 0;
        std::size_t q = 0;
        while (p < ac.size() || q < bc.size()) {
            if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
                r.emplace_back(ac[p], alpha * av[p]);
                ++p;
            } else if (p == ac.size() || bc[q] < ac[p]) {
                r.emplace_back(bc[q], beta * bv[q]);
                ++q;
            } else {
                r.emplace_back(ac[p], alpha * av[p] + beta * bv[q]);
                ++p;
                ++q;
            }
        }
    }
    return SparseMatrix::from_rows(a.cols(), std::move(rows));
}

SparseMatrix spmul(const SparseMatrix& a, const SparseMatrix& b, Execution exec) {
    if (a.cols() != b.rows()) throw std::invalid_argument("spmul: dimension mismatch");
    return exec == Execution::serial ? kernels::spmul_serial(a, b) : kernels::spmul_parallel(a, b);
}

SparseMatrix scale(const SparseMatrix& a, double s) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(a.rows()));
    for (std::int32_t i = 0; i < a.rows(); ++i) {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        auto& r = rows[static_cast<std::size_t>(i)];
        r.reserve(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) r.emplace_back(c[k], s * v[k]);
    }
    return SparseMatrix::from_rows(a.cols(), std::move(rows));
}

SparseMatrix transpose(const SparseMatrix& a) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(a.cols()));
    for (std::int32_t i = 0; i < a.rows(); ++i) {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) rows[static_cast<std::size_t>(c[k])].emplace_back(i, v[k]);
    }
    return SparseMatrix::from_rows(a.rows(), std::move(rows));
}

void write_matrix_market(const SparseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    out.precision(17);
    for (std::int32_t i = 0; i < m.rows(); ++i) {
        const auto c = m.row_cols(i);
        const auto v = m.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) out << i + 1 << ' ' << c[k] + 1 << ' ' << v[k] << '\n';
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
        throw std::runtime_error(path.string() + ": unsupported MatrixMarket header");
    }
    while (std::getline(in, line) && !line.empty() && line[0] == '%') {
    }
    std::istringstream dims(line);
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::size_t nnz = 0;
    if (!(dims >> rows >> cols >> nnz)) throw std::runtime_error(path.string() + ": malformed size line");
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::int32_t i = 0;
        std::int32_t j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw std::runtime_error(path.string() + ": truncated entry list");
        t.push_back({i - 1, j - 1, v});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace dasm
