#pragma once

#include <cstdint>
#include <vector>

#include "rpsvm/matrix.hpp"

namespace rpsvm {

// In-place normalized Walsh-Hadamard transform; d must be a power of two.
// The normalized transform is symmetric orthogonal, so it is its own inverse.
void fwht_inplace(double* v, size_t d);
inline void fwht_inplace(std::vector<double>& v) { fwht_inplace(v.data(), v.size()); }

// Unnormalized Hadamard transform of v evaluated only at the given output
// indices. `targets` must be sorted ascending and unique; out[k] receives
// coordinate targets[k]. v (length d, power of two) is used as scratch.
// Cost O(d log t) for t targets instead of O(d log d).
void hadamard_subset(double* v, size_t d, const uint32_t* targets, size_t num_targets, double* out);

struct PowerIterOptions {
    size_t max_iter = 1000;
    double tol = 1e-9;  // relative change of successive Rayleigh quotients
};

// Largest singular value via power iteration on A^T A with a deterministic
// start vector. Exact 0 for the zero matrix.
double spectral_norm(const DenseMatrix& a, const PowerIterOptions& opts = {});
double spectral_norm(const DataMatrix& a, const PowerIterOptions& opts = {});

struct SvdFactors {
    DenseMatrix u;                       // n x rank, orthonormal columns
    std::vector<double> singular_values; // length rank, nonincreasing
    DenseMatrix v;                       // d x rank, orthonormal columns
    size_t rank = 0;
};

struct SvdOptions {
    double rank_tolerance = 1e-10;  // relative to sigma_1
    size_t dim_cap = 4096;          // cap on min(n, d)
    size_t max_sweeps = 64;
};

// Thin SVD by one-sided Jacobi applied on the smaller dimension.
SvdFactors svd_thin(const DenseMatrix& a, const SvdOptions& opts = {});

// Dense products.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x);
std::vector<double> matvec(const DataMatrix& a, const std::vector<double>& x);
std::vector<double> matvec_transposed(const DataMatrix& a, const std::vector<double>& x);  // A^T x
DenseMatrix transpose(const DenseMatrix& a);

// G = A A^T over data rows (dense or CSR).
DenseMatrix gram_rows(const DataMatrix& a);

}  // namespace rpsvm
