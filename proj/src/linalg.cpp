#include "rpsvm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rpsvm/errors.hpp"
#include "rpsvm/parallel.hpp"
#include "rpsvm/simd.hpp"

namespace rpsvm {

namespace {

bool is_pow2(size_t d) { return d != 0 && (d & (d - 1)) == 0; }

void hadamard_subset_rec(double* v, size_t m, const uint32_t* t, size_t nt, double* out,
                         uint32_t base) {
    if (nt == 0) return;
    if (m == 1) {
        out[0] = v[0];
        return;
    }
    size_t h = m / 2;
    size_t split = 0;
    while (split < nt && t[split] < base + h) ++split;
    simd::butterfly(v, v + h, h);
    hadamard_subset_rec(v, h, t, split, out, base);
    hadamard_subset_rec(v + h, h, t + split, nt - split, out + split, base + static_cast<uint32_t>(h));
}

}  // namespace

void fwht_inplace(double* v, size_t d) {
    if (!is_pow2(d)) {
        throw std::invalid_argument("fwht_inplace: dimension " + std::to_string(d) +
                                    " is not a power of two");
    }
    for (size_t h = 1; h < d; h <<= 1) {
        for (size_t i = 0; i < d; i += 2 * h) simd::butterfly(v + i, v + i + h, h);
    }
    simd::scal(1.0 / std::sqrt(static_cast<double>(d)), v, d);
}

void hadamard_subset(double* v, size_t d, const uint32_t* targets, size_t num_targets, double* out) {
    if (!is_pow2(d)) throw std::invalid_argument("hadamard_subset: dimension is not a power of two");
    hadamard_subset_rec(v, d, targets, num_targets, out, 0);
}

double spectral_norm(const DataMatrix& a, const PowerIterOptions& opts) {
    size_t n = a.rows();
    size_t d = a.cols();
    if (n == 0 || d == 0) return 0.0;
    if (!a.all_finite()) throw std::invalid_argument("spectral_norm: non-finite entries");
    std::vector<double> v(d);
    for (size_t i = 0; i < d; ++i) {
        v[i] = 1.0 + 1e-6 * static_cast<double>(i) / static_cast<double>(d > 1 ? d - 1 : 1);
    }
    double nv = std::sqrt(simd::nrm2sq(v.data(), d));
    simd::scal(1.0 / nv, v.data(), d);
    double lambda = 0.0;
    for (size_t it = 0; it < opts.max_iter; ++it) {
        std::vector<double> u = matvec(a, v);
        double lam = simd::nrm2sq(u.data(), n);  // v has unit norm
        if (lam == 0.0) return 0.0;
        std::vector<double> w = matvec_transposed(a, u);
        double nw = std::sqrt(simd::nrm2sq(w.data(), d));
        if (nw == 0.0) return std::sqrt(lam);
        simd::scal(1.0 / nw, w.data(), d);
        v.swap(w);
        if (it > 0 && std::abs(lam - lambda) <= opts.tol * lam) return std::sqrt(lam);
        lambda = lam;
    }
    return std::sqrt(lambda);
}

double spectral_norm(const DenseMatrix& a, const PowerIterOptions& opts) {
    return spectral_norm(DataMatrix(a), opts);
}

namespace {

// One-sided Jacobi on the columns of w (m x k, column-major). Accumulates the
// right rotations into j (k x k, column-major, preinitialized to identity).
void jacobi_orthogonalize(std::vector<double>& w, std::vector<double>& j, size_t m, size_t k,
                          size_t max_sweeps) {
    const double thresh = 1e-14;
    for (size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (size_t p = 0; p < k; ++p) {
            double* wp = w.data() + p * m;
            for (size_t q = p + 1; q < k; ++q) {
                double* wq = w.data() + q * m;
                double apq = simd::dot(wp, wq, m);
                if (apq == 0.0) continue;
                double app = simd::nrm2sq(wp, m);
                double aqq = simd::nrm2sq(wq, m);
                if (app == 0.0 || aqq == 0.0) continue;
                if (std::abs(apq) <= thresh * std::sqrt(app * aqq)) continue;
                double tau = (aqq - app) / (2.0 * apq);
                double sgn = tau >= 0.0 ? 1.0 : -1.0;
                double t = -sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                simd::rot(wp, wq, c, s, m);
                simd::rot(j.data() + p * k, j.data() + q * k, c, s, k);
                rotated = true;
            }
        }
        if (!rotated) return;
    }
    throw numerical_error("svd_thin: Jacobi sweeps did not converge");
}

}  // namespace

SvdFactors svd_thin(const DenseMatrix& a, const SvdOptions& opts) {
    size_t n = a.rows;
    size_t d = a.cols;
    if (std::min(n, d) > opts.dim_cap) {
        throw capacity_error("svd_thin: min(n,d)=" + std::to_string(std::min(n, d)) +
                             " exceeds cap " + std::to_string(opts.dim_cap) +
                             "; use a Gram-matrix path for larger problems");
    }
    if (opts.rank_tolerance <= 0.0) throw std::invalid_argument("svd_thin: rank_tolerance must be > 0");
    if (!a.all_finite()) throw std::invalid_argument("svd_thin: non-finite entries");

    bool transposed = n < d;  // orthogonalize along the smaller dimension
    size_t m = transposed ? d : n;
    size_t k = transposed ? n : d;

    // Working matrix column-major; columns are the vectors to orthogonalize.
    std::vector<double> w(m * k);
    for (size_t i = 0; i < n; ++i) {
        for (size_t jj = 0; jj < d; ++jj) {
            double v = a.at(i, jj);
            if (transposed) {
                w[i * m + jj] = v;  // column i holds row i of a
            } else {
                w[jj * m + i] = v;  // column jj holds column jj of a
            }
        }
    }
    std::vector<double> rot(k * k, 0.0);
    for (size_t i = 0; i < k; ++i) rot[i * k + i] = 1.0;

    jacobi_orthogonalize(w, rot, m, k, opts.max_sweeps);

    std::vector<double> sigma(k);
    for (size_t c = 0; c < k; ++c) sigma[c] = std::sqrt(simd::nrm2sq(w.data() + c * m, m));
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return sigma[x] > sigma[y]; });

    double sigma1 = k > 0 ? sigma[order[0]] : 0.0;
    size_t rank = 0;
    while (rank < k && sigma[order[rank]] > opts.rank_tolerance * sigma1 && sigma[order[rank]] > 0.0) {
        ++rank;
    }
    if (sigma1 == 0.0) rank = 0;

    SvdFactors f;
    f.rank = rank;
    f.singular_values.resize(rank);
    // Columns of the orthogonalized w are (left factor) * sigma; rot holds the
    // right factor. Map back depending on orientation.
    DenseMatrix big(m, rank);   // normalized w columns
    DenseMatrix small(k, rank); // rot columns
    for (size_t c = 0; c < rank; ++c) {
        size_t src = order[c];
        f.singular_values[c] = sigma[src];
        double inv = 1.0 / sigma[src];
        for (size_t i = 0; i < m; ++i) big.at(i, c) = w[src * m + i] * inv;
        for (size_t i = 0; i < k; ++i) small.at(i, c) = rot[src * k + i];
    }
    if (transposed) {
        f.u = std::move(small);  // n x rank
        f.v = std::move(big);    // d x rank
    } else {
        f.u = std::move(big);
        f.v = std::move(small);
    }
    return f;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
    DenseMatrix c(a.rows, b.cols);
    parallel_for(0, a.rows, [&](size_t i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (size_t k = 0; k < a.cols; ++k) {
            if (ai[k] != 0.0) simd::axpy(ai[k], b.row(k), ci, b.cols);
        }
    });
    return c;
}

std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (x.size() != a.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(a.rows);
    for (size_t i = 0; i < a.rows; ++i) y[i] = simd::dot(a.row(i), x.data(), a.cols);
    return y;
}

std::vector<double> matvec(const DataMatrix& a, const std::vector<double>& x) {
    if (!a.is_sparse()) return matvec(a.dense(), x);
    const SparseMatrix& s = a.sparse();
    if (x.size() != s.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(s.rows, 0.0);
    for (size_t i = 0; i < s.rows; ++i) {
        double acc = 0.0;
        for (size_t kk = s.row_ptr[i]; kk < s.row_ptr[i + 1]; ++kk) acc += s.values[kk] * x[s.col_idx[kk]];
        y[i] = acc;
    }
    return y;
}

std::vector<double> matvec_transposed(const DataMatrix& a, const std::vector<double>& x) {
    if (x.size() != a.rows()) throw std::invalid_argument("matvec_transposed: dimension mismatch");
    std::vector<double> y(a.cols(), 0.0);
    if (a.is_sparse()) {
        const SparseMatrix& s = a.sparse();
        for (size_t i = 0; i < s.rows; ++i) {
            double xi = x[i];
            if (xi == 0.0) continue;
            for (size_t kk = s.row_ptr[i]; kk < s.row_ptr[i + 1]; ++kk) y[s.col_idx[kk]] += xi * s.values[kk];
        }
    } else {
        const DenseMatrix& d = a.dense();
        for (size_t i = 0; i < d.rows; ++i) {
            if (x[i] != 0.0) simd::axpy(x[i], d.row(i), y.data(), d.cols);
        }
    }
    return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (size_t i = 0; i < a.rows; ++i) {
        for (size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    }
    return t;
}

DenseMatrix gram_rows(const DataMatrix& a) {
    size_t n = a.rows();
    size_t d = a.cols();
    DenseMatrix g(n, n);
    if (a.is_sparse()) {
        const SparseMatrix& s = a.sparse();
        parallel_for(0, n, [&](size_t i) {
            std::vector<double> scratch(d, 0.0);
            for (size_t kk = s.row_ptr[i]; kk < s.row_ptr[i + 1]; ++kk) scratch[s.col_idx[kk]] = s.values[kk];
            for (size_t j = i; j < n; ++j) {
                double acc = 0.0;
                for (size_t kk = s.row_ptr[j]; kk < s.row_ptr[j + 1]; ++kk) {
                    acc += scratch[s.col_idx[kk]] * s.values[kk];
                }
                g.at(i, j) = acc;
            }
        });
    } else {
        const DenseMatrix& m = a.dense();
        parallel_for(0, n, [&](size_t i) {
            for (size_t j = i; j < n; ++j) g.at(i, j) = simd::dot(m.row(i), m.row(j), d);
        });
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < i; ++j) g.at(i, j) = g.at(j, i);
    }
    return g;
}

}  // namespace rpsvm
