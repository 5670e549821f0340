#pragma once

#include <string>
#include <vector>

#include "rpsvm/matrix.hpp"
#include "rpsvm/sketch.hpp"
#include "rpsvm/svm.hpp"

namespace rpsvm {

struct MebResult {
    std::vector<double> center;
    double radius = 0.0;  // exact max distance from the returned center
    size_t iterations = 0;
    double approx_delta = 0.0;
};

struct DiscrepancyResult {
    double e_norm = 0.0;  // ||V'V - V'RR'V||_2
    size_t rho = 0;
    size_t r = 0;
    SketchKind kind = SketchKind::gaussian;
    uint64_t seed = 0;
};

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double slack = 0.0;  // rhs - lhs
    std::string bound_name;
};

// Badoiu-Clarkson core-set iteration, ceil(1/delta^2)+1 rounds. The returned
// radius R satisfies B <= R <= (1+delta) B for the exact radius B.
MebResult min_enclosing_ball(const DataMatrix& x, double approx_delta = 0.01);

// e_norm of E = V'V - (V'R)(V'R)' for an orthonormal-column V (d x rho).
// The sketch is applied to the rows of V', never materializing R.
DiscrepancyResult spectral_discrepancy(const DenseMatrix& v, const SketchOperator& op);

// Margin preservation in the deterministic proof form:
//   gamma_sketched^2 >= (1 - e/(1-e)) * gamma_full^2
// with e the measured discrepancy. Throws vacuous_bound_error when e >= 1.
BoundCheck verify_margin_bound(const SvmModel& full, const SvmModel& sketched, double e_norm);

// Radius preservation: appends the approximate center to X, measures the
// discrepancy of the augmented right singular space, and checks
//   B_sketched^2 <= (1 + ||E_B||) * B^2 * (1 + delta)^3.
BoundCheck verify_radius_bound(const DataMatrix& x, const SketchOperator& op,
                               double approx_delta = 0.01);

// Combined ratio bound with eps = max(e_norm, e_b_norm):
//   B~^2/gamma~^2 <= (1+eps)/(1-eps) * B^2/gamma^2 * (1+delta)^3.
BoundCheck verify_combined_bound(const SvmModel& full, const SvmModel& sketched,
                                 const MebResult& meb_full, const MebResult& meb_sketched,
                                 double e_norm, double e_b_norm);

std::string bound_check_to_json(const BoundCheck& check);

}  // namespace rpsvm
