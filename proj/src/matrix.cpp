#include "rpsvm/matrix.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "rpsvm/simd.hpp"

namespace rpsvm {

DenseMatrix DenseMatrix::identity(size_t n) {
    DenseMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void SparseMatrix::validate() const {
    if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != values.size() ||
        col_idx.size() != values.size()) {
        throw std::invalid_argument("sparse matrix: inconsistent CSR arrays");
    }
    for (size_t i = 0; i < rows; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("sparse matrix: row_ptr not nondecreasing");
        for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col_idx[k] >= cols) throw std::invalid_argument("sparse matrix: column index out of range");
            if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1]) {
                throw std::invalid_argument("sparse matrix: column indices not strictly increasing");
            }
            if (values[k] == 0.0) throw std::invalid_argument("sparse matrix: explicit zero stored");
        }
    }
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d.at(i, col_idx[k]) = values[k];
    }
    return d;
}

bool SparseMatrix::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

size_t DataMatrix::rows() const { return is_sparse() ? sparse().rows : dense().rows; }

size_t DataMatrix::cols() const { return is_sparse() ? sparse().cols : dense().cols; }

size_t DataMatrix::nnz() const {
    if (is_sparse()) return sparse().nnz();
    size_t n = 0;
    for (double v : dense().data) n += (v != 0.0);
    return n;
}

bool DataMatrix::all_finite() const { return is_sparse() ? sparse().all_finite() : dense().all_finite(); }

void DataMatrix::copy_row(size_t i, double* out) const {
    size_t c = cols();
    if (is_sparse()) {
        std::memset(out, 0, c * sizeof(double));
        const SparseMatrix& s = sparse();
        for (size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) out[s.col_idx[k]] = s.values[k];
    } else {
        std::memcpy(out, dense().row(i), c * sizeof(double));
    }
}

DenseMatrix DataMatrix::to_dense() const { return is_sparse() ? sparse().to_dense() : dense(); }

double DataMatrix::row_nrm2sq(size_t i) const {
    if (is_sparse()) {
        const SparseMatrix& s = sparse();
        return simd::nrm2sq(s.values.data() + s.row_ptr[i], s.row_ptr[i + 1] - s.row_ptr[i]);
    }
    return simd::nrm2sq(dense().row(i), dense().cols);
}

}  // namespace rpsvm
