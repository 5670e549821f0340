#include "rpsvm/svm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "rpsvm/errors.hpp"
#include "rpsvm/linalg.hpp"
#include "rpsvm/simd.hpp"

namespace rpsvm {

namespace detail {

GramSubsetQ::GramSubsetQ(const DenseMatrix& gram, std::vector<size_t> idx, std::vector<double> z)
    : gram_(gram), idx_(std::move(idx)), z_(std::move(z)) {}

void GramSubsetQ::column(size_t j, double* out) const {
    const double* gj = gram_.row(idx_[j]);
    double zj = z_[j];
    for (size_t i = 0; i < idx_.size(); ++i) out[i] = z_[i] * zj * gj[idx_[i]];
}

double GramSubsetQ::diag(size_t j) const { return gram_.at(idx_[j], idx_[j]); }

namespace {

// Q for the doubled regression problem backed by an n x n kernel source.
class DoubledQ final : public QSource {
public:
    DoubledQ(const QSource& base) : base_(base), n_(base.size()), buf_(base.size()) {}
    size_t size() const override { return 2 * n_; }
    void column(size_t j, double* out) const override {
        size_t jj = j % n_;
        double zj = j < n_ ? 1.0 : -1.0;
        base_.column(jj, buf_.data());
        for (size_t i = 0; i < n_; ++i) {
            out[i] = zj * buf_[i];
            out[i + n_] = -zj * buf_[i];
        }
    }
    double diag(size_t j) const override { return base_.diag(j % n_); }

private:
    const QSource& base_;
    size_t n_;
    mutable std::vector<double> buf_;
};

// Kernel columns computed on demand from data rows (no Gram storage).
class LazyKernelQ final : public QSource {
public:
    LazyKernelQ(const DataMatrix& x, std::vector<double> z) : x_(x), z_(std::move(z)) {}
    size_t size() const override { return x_.rows(); }
    void column(size_t j, double* out) const override {
        static thread_local std::vector<double> rowj;
        rowj.resize(x_.cols());
        x_.copy_row(j, rowj.data());
        for (size_t i = 0; i < x_.rows(); ++i) {
            double acc = 0.0;
            x_.for_each_in_row(i, [&](uint32_t c, double v) { acc += v * rowj[c]; });
            out[i] = z_[i] * z_[j] * acc;
        }
    }
    double diag(size_t j) const override { return x_.row_nrm2sq(j); }

private:
    const DataMatrix& x_;
    std::vector<double> z_;
};

}  // namespace

void svr_doubled_terms(const std::vector<double>& targets, double tube, std::vector<double>& p,
                       std::vector<double>& z) {
    size_t n = targets.size();
    p.resize(2 * n);
    z.resize(2 * n);
    for (size_t i = 0; i < n; ++i) {
        p[i] = tube - targets[i];
        p[i + n] = tube + targets[i];
        z[i] = 1.0;
        z[i + n] = -1.0;
    }
}

SmoResult smo_solve(const QSource& q, const std::vector<double>& p, const std::vector<double>& z,
                    double c, double tol, uint64_t max_iter,
                    const std::function<void(uint64_t, double)>& hook, uint64_t hook_every) {
    const size_t n = q.size();
    if (p.size() != n || z.size() != n) throw std::invalid_argument("smo_solve: size mismatch");
    if (!(c > 0.0)) throw std::invalid_argument("smo_solve: C must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("smo_solve: tol must be positive");

    SmoResult res;
    res.beta.assign(n, 0.0);
    std::vector<double> grad = p;
    std::vector<double> coli(n), colj(n);
    std::vector<double>& beta = res.beta;

    const uint64_t refresh_every = std::max<uint64_t>(100'000, 64 * n);

    auto emit_hook = [&](uint64_t it) {
        if (!hook) return;
        double f = 0.0;
        for (size_t k = 0; k < n; ++k) f += beta[k] * (grad[k] + p[k]);
        hook(it, -0.5 * f);  // max-form dual objective
    };

    uint64_t it = 0;
    for (; it < max_iter; ++it) {
        // Maximal violating pair; ascending scan keeps ties at lowest index.
        size_t i_up = n, j_low = n;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < n; ++k) {
            double v = -z[k] * grad[k];
            bool in_up = (z[k] > 0.0) ? (beta[k] < c) : (beta[k] > 0.0);
            bool in_low = (z[k] > 0.0) ? (beta[k] > 0.0) : (beta[k] < c);
            if (in_up && v > gmax) {
                gmax = v;
                i_up = k;
            }
            if (in_low && v < gmin) {
                gmin = v;
                j_low = k;
            }
        }
        if (i_up == n || j_low == n) {
            res.kkt_violation = 0.0;
            res.converged = true;
            break;
        }
        double violation = gmax - gmin;
        if (violation <= tol) {
            res.kkt_violation = violation;
            res.converged = true;
            break;
        }
        res.kkt_violation = violation;

        q.column(i_up, coli.data());
        q.column(j_low, colj.data());
        double quad = q.diag(i_up) + q.diag(j_low) - 2.0 * z[i_up] * z[j_low] * coli[j_low];
        if (quad <= 1e-12) quad = 1e-12;

        double cap_i = (z[i_up] > 0.0) ? (c - beta[i_up]) : beta[i_up];
        double cap_j = (z[j_low] > 0.0) ? beta[j_low] : (c - beta[j_low]);
        double t = std::min(violation / quad, std::min(cap_i, cap_j));

        if (t == cap_i) {
            beta[i_up] = (z[i_up] > 0.0) ? c : 0.0;
        } else {
            beta[i_up] += z[i_up] * t;
        }
        if (t == cap_j) {
            beta[j_low] = (z[j_low] > 0.0) ? 0.0 : c;
        } else {
            beta[j_low] -= z[j_low] * t;
        }

        simd::axpy(z[i_up] * t, coli.data(), grad.data(), n);
        simd::axpy(-z[j_low] * t, colj.data(), grad.data(), n);

        if ((it + 1) % refresh_every == 0) {
            // Rebuild the gradient to shed accumulated roundoff.
            grad = p;
            for (size_t k = 0; k < n; ++k) {
                if (beta[k] != 0.0) {
                    q.column(k, coli.data());
                    simd::axpy(beta[k], coli.data(), grad.data(), n);
                }
            }
        }
        if (hook && (it % hook_every == 0)) emit_hook(it);
    }
    res.iterations = it;
    if (hook) emit_hook(it);
    return res;
}

}  // namespace detail

namespace {

void check_features(const DataMatrix& x) {
    if (!x.all_finite()) throw std::invalid_argument("training data contains non-finite features");
}

std::unique_ptr<detail::QSource> make_kernel_source(const DataMatrix& x,
                                                    const std::vector<double>& z,
                                                    const SolverOptions& opts,
                                                    DenseMatrix& gram_store) {
    if (opts.gram != nullptr) {
        if (opts.gram->rows != x.rows() || opts.gram->cols != x.rows()) {
            throw std::invalid_argument("SolverOptions::gram has wrong shape");
        }
        std::vector<size_t> idx(x.rows());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return std::make_unique<detail::GramSubsetQ>(*opts.gram, std::move(idx), z);
    }
    if (x.rows() <= opts.gram_cap) {
        gram_store = gram_rows(x);
        std::vector<size_t> idx(x.rows());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return std::make_unique<detail::GramSubsetQ>(gram_store, std::move(idx), z);
    }
    return std::make_unique<detail::LazyKernelQ>(x, z);
}

}  // namespace

SvmModel train_svc(const SvcProblem& p, const SolverOptions& opts) {
    const size_t n = p.x.rows();
    if (p.y.size() != n) throw std::invalid_argument("train_svc: label count mismatch");
    if (!(p.c > 0.0)) throw std::invalid_argument("train_svc: C must be positive");
    check_features(p.x);
    bool has_pos = false, has_neg = false;
    for (double yi : p.y) {
        if (yi == 1.0) {
            has_pos = true;
        } else if (yi == -1.0) {
            has_neg = true;
        } else {
            throw std::invalid_argument("train_svc: labels must be exactly -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw degenerate_problem_error("train_svc: training data contains a single class");
    }

    auto t0 = std::chrono::steady_clock::now();
    DenseMatrix gram_store;
    auto q = make_kernel_source(p.x, p.y, opts, gram_store);
    auto sol = detail::smo_solve(*q, std::vector<double>(n, -1.0), p.y, p.c, opts.tol,
                                 opts.max_iter, opts.objective_hook, opts.hook_every);

    SvmModel m;
    m.task = SvmTask::classify;
    m.c = p.c;
    m.alphas = std::move(sol.beta);
    m.kkt_violation = sol.kkt_violation;
    m.converged = sol.converged;

    std::vector<double> coef(n);
    for (size_t i = 0; i < n; ++i) coef[i] = m.alphas[i] * p.y[i];
    m.w = matvec_transposed(p.x, coef);
    double wn2 = simd::nrm2sq(m.w.data(), m.w.size());
    double asum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        asum += m.alphas[i];
        if (m.alphas[i] > 0.0) m.support_indices.push_back(i);
    }
    m.objective = asum - 0.5 * wn2;
    m.gamma = wn2 > 0.0 ? 1.0 / std::sqrt(wn2) : 0.0;
    m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

SvmModel train_svr(const SvrProblem& p, const SolverOptions& opts) {
    const size_t n = p.x.rows();
    if (p.y.size() != n) throw std::invalid_argument("train_svr: target count mismatch");
    if (!(p.c > 0.0)) throw std::invalid_argument("train_svr: C must be positive");
    if (p.tube_epsilon < 0.0) throw std::invalid_argument("train_svr: tube epsilon must be >= 0");
    check_features(p.x);
    for (double yi : p.y) {
        if (!std::isfinite(yi)) throw std::invalid_argument("train_svr: non-finite target");
    }

    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ones(n, 1.0);
    DenseMatrix gram_store;
    auto base = make_kernel_source(p.x, ones, opts, gram_store);
    detail::DoubledQ q2(*base);
    std::vector<double> pterm, zterm;
    detail::svr_doubled_terms(p.y, p.tube_epsilon, pterm, zterm);
    auto sol = detail::smo_solve(q2, pterm, zterm, p.c, opts.tol, opts.max_iter,
                                 opts.objective_hook, opts.hook_every);

    SvmModel m;
    m.task = SvmTask::regress;
    m.c = p.c;
    m.alphas.resize(n);
    for (size_t i = 0; i < n; ++i) m.alphas[i] = sol.beta[i] - sol.beta[i + n];
    m.kkt_violation = sol.kkt_violation;
    m.converged = sol.converged;

    m.w = matvec_transposed(p.x, m.alphas);
    double wn2 = simd::nrm2sq(m.w.data(), m.w.size());
    double lin = 0.0, l1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        lin += p.y[i] * m.alphas[i];
        l1 += std::abs(m.alphas[i]);
        if (m.alphas[i] != 0.0) m.support_indices.push_back(i);
    }
    m.objective = lin - p.tube_epsilon * l1 - 0.5 * wn2;
    m.gamma = wn2 > 0.0 ? 1.0 / std::sqrt(wn2) : 0.0;
    m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

std::vector<double> predict(const SvmModel& model, const DataMatrix& x_new) {
    if (x_new.cols() != model.w.size()) {
        throw std::invalid_argument("predict: feature dimension mismatch");
    }
    return matvec(x_new, model.w);
}

double margin(const SvmModel& model) {
    if (model.gamma <= 0.0) throw undefined_margin_error("margin: weight vector is zero");
    return model.gamma;
}

std::string model_to_json(const SvmModel& model) {
    nlohmann::json j;
    j["kind"] = model.task == SvmTask::classify ? "svc" : "svr";
    j["C"] = model.c;
    j["alphas"] = model.alphas;
    j["w"] = model.w;
    j["gamma"] = model.gamma;
    j["objective"] = model.objective;
    return j.dump();
}

SvmModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SvmModel m;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "svc") {
        m.task = SvmTask::classify;
    } else if (kind == "svr") {
        m.task = SvmTask::regress;
    } else {
        throw std::invalid_argument("model_from_json: unknown kind " + kind);
    }
    m.c = j.at("C").get<double>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.w = j.at("w").get<std::vector<double>>();
    m.gamma = j.at("gamma").get<double>();
    m.objective = j.at("objective").get<double>();
    m.converged = true;
    for (size_t i = 0; i < m.alphas.size(); ++i) {
        bool sv = m.task == SvmTask::classify ? m.alphas[i] > 0.0 : m.alphas[i] != 0.0;
        if (sv) m.support_indices.push_back(i);
    }
    return m;
}

}  // namespace rpsvm
