#pragma once

// Independent oracles used by the unit and acceptance suites. These
// deliberately avoid the library's solver paths: the Hadamard matrix is built
// from its recursive block definition, the QP oracle is projected-gradient
// with exact box+hyperplane projection, and the enclosing-ball oracles use
// grid refinement / simplex-projected gradient on the dual.

#include <cstdint>
#include <vector>

#include "rpsvm/matrix.hpp"

namespace oracles {

// Normalized Hadamard-Walsh matrix built by the O(d^2) recursive block rule.
rpsvm::DenseMatrix naive_hadamard(size_t d);

struct QpResult {
    std::vector<double> beta;
    double kkt = 0.0;
    uint64_t iterations = 0;
    bool converged = false;
};

// minimize 0.5 b'Qb + p'b  s.t.  sum z_i b_i = 0, 0 <= b <= C.
// Accelerated projected gradient with restarts; projection onto the
// box-hyperplane intersection is done by bisection on the multiplier.
QpResult qp_box_hyperplane(const rpsvm::DenseMatrix& q, const std::vector<double>& p,
                           const std::vector<double>& z, double c, double tol = 1e-10,
                           uint64_t max_iter = 2'000'000);

// Exact-ish 2D minimum enclosing ball radius by grid search with refinement.
double meb_radius_grid_2d(const rpsvm::DenseMatrix& points, int levels = 6, int grid = 64);

// Minimum enclosing ball via projected gradient on the dual
// max lambda'diag(G) - lambda'G lambda over the simplex. Returns the radius.
double meb_radius_qp(const rpsvm::DenseMatrix& points, uint64_t iters = 200'000);

// Random d x rho matrix with orthonormal columns (Gaussian + twice-iterated
// modified Gram-Schmidt).
rpsvm::DenseMatrix random_orthonormal(size_t d, size_t rho, uint64_t seed);

rpsvm::DenseMatrix random_dense(size_t n, size_t d, uint64_t seed, double scale = 1.0);
rpsvm::SparseMatrix random_sparse(size_t n, size_t d, double density, uint64_t seed);

double max_abs_diff(const rpsvm::DenseMatrix& a, const rpsvm::DenseMatrix& b);

}  // namespace oracles
