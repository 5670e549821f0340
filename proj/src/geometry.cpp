#include "rpsvm/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rpsvm/errors.hpp"
#include "rpsvm/linalg.hpp"
#include "rpsvm/simd.hpp"

namespace rpsvm {

namespace {

constexpr double kRelSlack = 1e-9;

BoundCheck make_check(std::string name, double lhs, double rhs) {
    BoundCheck c;
    c.bound_name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = rhs - lhs;
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    c.satisfied = lhs <= rhs + kRelSlack * scale;
    return c;
}

double sq_dist_to_center(const DataMatrix& x, size_t i, const std::vector<double>& center,
                         double center_nrm2, double row_nrm2) {
    // ||x_i - c||^2 = ||x_i||^2 - 2 x_i.c + ||c||^2
    double cross = 0.0;
    x.for_each_in_row(i, [&](uint32_t c, double v) { cross += v * center[c]; });
    return row_nrm2 - 2.0 * cross + center_nrm2;
}

}  // namespace

MebResult min_enclosing_ball(const DataMatrix& x, double approx_delta) {
    size_t n = x.rows();
    size_t d = x.cols();
    if (n < 1) throw std::invalid_argument("min_enclosing_ball: empty matrix");
    if (!(approx_delta > 0.0 && approx_delta <= 0.5)) {
        throw std::invalid_argument("min_enclosing_ball: approx_delta must be in (0, 0.5]");
    }

    std::vector<double> row_nrm2(n);
    for (size_t i = 0; i < n; ++i) row_nrm2[i] = x.row_nrm2sq(i);

    MebResult res;
    res.approx_delta = approx_delta;
    res.center.assign(d, 0.0);
    x.copy_row(0, res.center.data());

    size_t rounds = static_cast<size_t>(std::ceil(1.0 / (approx_delta * approx_delta))) + 1;
    res.iterations = rounds;
    std::vector<double> far_row(d);
    for (size_t k = 1; k <= rounds; ++k) {
        double cn2 = simd::nrm2sq(res.center.data(), d);
        size_t far = 0;
        double fdist = -1.0;
        for (size_t i = 0; i < n; ++i) {
            double dist = sq_dist_to_center(x, i, res.center, cn2, row_nrm2[i]);
            if (dist > fdist) {
                fdist = dist;
                far = i;
            }
        }
        x.copy_row(far, far_row.data());
        double step = 1.0 / static_cast<double>(k + 1);
        for (size_t j = 0; j < d; ++j) res.center[j] += step * (far_row[j] - res.center[j]);
    }

    double cn2 = simd::nrm2sq(res.center.data(), d);
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dist = sq_dist_to_center(x, i, res.center, cn2, row_nrm2[i]);
        if (dist > worst) worst = dist;
    }
    res.radius = std::sqrt(std::max(0.0, worst));
    return res;
}

DiscrepancyResult spectral_discrepancy(const DenseMatrix& v, const SketchOperator& op) {
    size_t d = v.rows;
    size_t rho = v.cols;
    if (d != op.d) throw std::invalid_argument("spectral_discrepancy: dimension mismatch");
    // Orthonormality precondition.
    DenseMatrix vt = transpose(v);
    for (size_t i = 0; i < rho; ++i) {
        for (size_t j = i; j < rho; ++j) {
            double g = simd::dot(vt.row(i), vt.row(j), d);
            double expect = i == j ? 1.0 : 0.0;
            if (std::abs(g - expect) > 1e-6) {
                throw std::invalid_argument("spectral_discrepancy: V does not have orthonormal columns");
            }
        }
    }
    DenseMatrix m = apply_sketch(op, DataMatrix(vt));  // rho x r
    DenseMatrix e(rho, rho);
    for (size_t i = 0; i < rho; ++i) {
        for (size_t j = 0; j < rho; ++j) {
            double mm = simd::dot(m.row(i), m.row(j), op.r);
            e.at(i, j) = (i == j ? 1.0 : 0.0) - mm;
        }
    }
    DiscrepancyResult res;
    res.e_norm = spectral_norm(e);
    res.rho = rho;
    res.r = op.r;
    res.kind = op.kind;
    res.seed = op.seed;
    return res;
}

BoundCheck verify_margin_bound(const SvmModel& full, const SvmModel& sketched, double e_norm) {
    if (!full.converged || !sketched.converged) {
        throw std::invalid_argument("verify_margin_bound: models must be converged");
    }
    if (e_norm < 0.0) throw std::invalid_argument("verify_margin_bound: e_norm must be >= 0");
    if (e_norm >= 1.0) {
        throw vacuous_bound_error("verify_margin_bound: measured discrepancy " +
                                  std::to_string(e_norm) + " >= 1 makes the bound vacuous");
    }
    double g_full = margin(full);
    double g_sk = margin(sketched);
    double lhs = (1.0 - e_norm / (1.0 - e_norm)) * g_full * g_full;
    double rhs = g_sk * g_sk;
    std::string name = full.task == SvmTask::regress ? "margin-regression" : "margin";
    return make_check(name, lhs, rhs);
}

BoundCheck verify_radius_bound(const DataMatrix& x, const SketchOperator& op, double approx_delta) {
    MebResult meb = min_enclosing_ball(x, approx_delta);

    // Augment X with the (approximate) center row and measure the
    // discrepancy on the augmented right singular space.
    DenseMatrix xb(x.rows() + 1, x.cols());
    for (size_t i = 0; i < x.rows(); ++i) x.copy_row(i, xb.row(i));
    for (size_t j = 0; j < x.cols(); ++j) xb.at(x.rows(), j) = meb.center[j];
    SvdFactors fb = svd_thin(xb);
    DiscrepancyResult disc = spectral_discrepancy(fb.v, op);

    DenseMatrix sketched = apply_sketch(op, x);
    MebResult meb_sk = min_enclosing_ball(DataMatrix(sketched), approx_delta);

    double slack = 1.0 + approx_delta;
    double lhs = meb_sk.radius * meb_sk.radius;
    double rhs = (1.0 + disc.e_norm) * meb.radius * meb.radius * slack * slack * slack;
    return make_check("radius", lhs, rhs);
}

BoundCheck verify_combined_bound(const SvmModel& full, const SvmModel& sketched,
                                 const MebResult& meb_full, const MebResult& meb_sketched,
                                 double e_norm, double e_b_norm) {
    double eps = std::max(e_norm, e_b_norm);
    if (eps < 0.0) throw std::invalid_argument("verify_combined_bound: negative discrepancy");
    if (eps >= 1.0) {
        throw vacuous_bound_error("verify_combined_bound: eps = " + std::to_string(eps) +
                                  " >= 1 makes the bound vacuous");
    }
    double g_full = margin(full);
    double g_sk = margin(sketched);
    double delta = std::max(meb_full.approx_delta, meb_sketched.approx_delta);
    double slack = 1.0 + delta;
    double lhs = (meb_sketched.radius * meb_sketched.radius) / (g_sk * g_sk);
    double rhs = (1.0 + eps) / (1.0 - eps) * (meb_full.radius * meb_full.radius) /
                 (g_full * g_full) * slack * slack * slack;
    return make_check("combined", lhs, rhs);
}

std::string bound_check_to_json(const BoundCheck& check) {
    nlohmann::json j;
    j["bound_name"] = check.bound_name;
    j["lhs"] = check.lhs;
    j["rhs"] = check.rhs;
    j["satisfied"] = check.satisfied;
    j["slack"] = check.slack;
    return j.dump();
}

}  // namespace rpsvm
