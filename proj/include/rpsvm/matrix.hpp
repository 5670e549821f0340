#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace rpsvm {

// Row-major dense matrix of doubles.
struct DenseMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t i, size_t j) { return data[i * cols + j]; }
    double at(size_t i, size_t j) const { return data[i * cols + j]; }
    double* row(size_t i) { return data.data() + i * cols; }
    const double* row(size_t i) const { return data.data() + i * cols; }

    static DenseMatrix identity(size_t n);
    bool all_finite() const;
};

// CSR sparse matrix. Column indices are strictly increasing within each row
// and no explicit zeros are stored.
struct SparseMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<size_t> row_ptr;  // length rows + 1
    std::vector<uint32_t> col_idx;
    std::vector<double> values;

    SparseMatrix() : row_ptr(1, 0) {}
    SparseMatrix(size_t r, size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

    size_t nnz() const { return values.size(); }
    void validate() const;  // throws std::invalid_argument on broken structure
    DenseMatrix to_dense() const;
    bool all_finite() const;
};

// A dataset is either dense or CSR; rows are data points.
class DataMatrix {
public:
    DataMatrix() : m_(DenseMatrix{}) {}
    DataMatrix(DenseMatrix m) : m_(std::move(m)) {}
    DataMatrix(SparseMatrix m) : m_(std::move(m)) {}

    bool is_sparse() const { return std::holds_alternative<SparseMatrix>(m_); }
    const DenseMatrix& dense() const { return std::get<DenseMatrix>(m_); }
    const SparseMatrix& sparse() const { return std::get<SparseMatrix>(m_); }

    size_t rows() const;
    size_t cols() const;
    size_t nnz() const;
    bool all_finite() const;

    // Writes row i into out[0..cols), zero-filled first.
    void copy_row(size_t i, double* out) const;
    DenseMatrix to_dense() const;
    double row_nrm2sq(size_t i) const;

    template <typename Fn>  // fn(col, value) over stored entries of row i
    void for_each_in_row(size_t i, Fn fn) const {
        if (is_sparse()) {
            const SparseMatrix& s = sparse();
            for (size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) fn(s.col_idx[k], s.values[k]);
        } else {
            const DenseMatrix& d = dense();
            const double* r = d.row(i);
            for (size_t j = 0; j < d.cols; ++j) {
                if (r[j] != 0.0) fn(static_cast<uint32_t>(j), r[j]);
            }
        }
    }

private:
    std::variant<DenseMatrix, SparseMatrix> m_;
};

}  // namespace rpsvm
