#include "rpsvm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "rpsvm/errors.hpp"
#include "rpsvm/linalg.hpp"
#include "rpsvm/parallel.hpp"
#include "rpsvm/rng.hpp"
#include "rpsvm/simd.hpp"

namespace rpsvm {

namespace {

constexpr uint64_t kSaltWeights = 21;
constexpr uint64_t kSaltFeatures = 22;
constexpr uint64_t kSaltNoise = 23;
constexpr uint64_t kSaltFolds = 24;
constexpr uint64_t kSaltOpSeed = 25;

double sign0(double v) { return v >= 0.0 ? 1.0 : -1.0; }

DenseMatrix synthetic_features(const SyntheticSpec& spec, std::vector<double>& w_hat) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("generate_synthetic: sigma must be > 0");
    if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("generate_synthetic: empty shape");
    rng::Stream ws(spec.seed, kSaltWeights);
    w_hat.resize(spec.d);
    for (size_t j = 0; j < spec.d; ++j) w_hat[j] = spec.mu + spec.sigma * ws.normal(j);
    double nw = std::sqrt(simd::nrm2sq(w_hat.data(), spec.d));
    simd::scal(1.0 / nw, w_hat.data(), spec.d);

    rng::Stream xs(spec.seed, kSaltFeatures);
    DenseMatrix x(spec.n, spec.d);
    parallel_for(0, spec.n, [&](size_t i) {
        double* row = x.row(i);
        for (size_t j = 0; j < spec.d; ++j) row[j] = xs.normal(i * spec.d + j);
    });
    return x;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    SyntheticData data;
    std::vector<double> w_hat;
    data.x = synthetic_features(spec, w_hat);
    data.y.resize(spec.n);
    for (size_t i = 0; i < spec.n; ++i) {
        data.y[i] = sign0(simd::dot(data.x.row(i), w_hat.data(), spec.d));
    }
    return data;
}

SyntheticData generate_synthetic_regression(const SyntheticSpec& spec, double noise_half_width) {
    if (noise_half_width < 0.0) {
        throw std::invalid_argument("generate_synthetic_regression: negative noise width");
    }
    SyntheticData data;
    std::vector<double> w_hat;
    data.x = synthetic_features(spec, w_hat);
    rng::Stream ns(spec.seed, kSaltNoise);
    data.y.resize(spec.n);
    for (size_t i = 0; i < spec.n; ++i) {
        double noise = (2.0 * ns.unit(i) - 1.0) * noise_half_width;
        data.y[i] = simd::dot(data.x.row(i), w_hat.data(), spec.d) + noise;
    }
    return data;
}

SyntheticSpec synthetic_preset(const std::string& name, uint64_t seed) {
    if (name == "d1") return SyntheticSpec{200, 2048, 0.0, 1.0, seed};
    if (name == "d2") return SyntheticSpec{250, 4096, 1.0, 1.5, seed};
    if (name == "d3") return SyntheticSpec{300, 8192, 2.0, 2.0, seed};
    throw std::invalid_argument("synthetic_preset: unknown preset " + name);
}

MetricRecord metrics(const std::vector<double>& predictions, const std::vector<double>& truth,
                     SvmTask task) {
    if (predictions.size() != truth.size()) throw std::invalid_argument("metrics: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("metrics: empty input");
    MetricRecord rec;
    size_t n = truth.size();
    if (task == SvmTask::classify) {
        size_t wrong = 0;
        for (size_t i = 0; i < n; ++i) wrong += (sign0(predictions[i]) != truth[i]);
        rec.error_percent = 100.0 * static_cast<double>(wrong) / static_cast<double>(n);
        return rec;
    }
    double se = 0.0, pm = 0.0, tm = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = predictions[i] - truth[i];
        se += d * d;
        pm += predictions[i];
        tm += truth[i];
    }
    rec.mse = se / static_cast<double>(n);
    pm /= static_cast<double>(n);
    tm /= static_cast<double>(n);
    double cov = 0.0, vp = 0.0, vt = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cov += (predictions[i] - pm) * (truth[i] - tm);
        vp += (predictions[i] - pm) * (predictions[i] - pm);
        vt += (truth[i] - tm) * (truth[i] - tm);
    }
    if (vt == 0.0) throw std::invalid_argument("metrics: zero-variance targets, beta undefined");
    rec.beta = vp == 0.0 ? 0.0 : (cov * cov) / (vp * vt);
    return rec;
}

namespace {

struct FoldOutcome {
    bool skipped = false;
    double eps_in = 0.0, eps_out = 0.0, mse = 0.0, beta = 0.0, gamma = 0.0, t_train = 0.0;
    size_t n_train = 0, n_test = 0;
};

// Trains one fold against a variant Gram matrix and evaluates through Gram
// columns; no weight vector is formed.
FoldOutcome run_fold(const DenseMatrix& gram, const std::vector<double>& y,
                     const std::vector<size_t>& train_idx, const std::vector<size_t>& test_idx,
                     const ExperimentConfig& cfg) {
    FoldOutcome out;
    out.n_train = train_idx.size();
    out.n_test = test_idx.size();
    size_t ntr = train_idx.size();

    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> coef(ntr);  // expansion coefficients in data order
    if (cfg.task == SvmTask::classify) {
        bool has_pos = false, has_neg = false;
        std::vector<double> z(ntr);
        for (size_t k = 0; k < ntr; ++k) {
            z[k] = y[train_idx[k]];
            (z[k] > 0 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
            out.skipped = true;
            return out;
        }
        detail::GramSubsetQ q(gram, train_idx, z);
        auto sol = detail::smo_solve(q, std::vector<double>(ntr, -1.0), z, cfg.c, cfg.solver_tol,
                                     cfg.max_iter);
        for (size_t k = 0; k < ntr; ++k) coef[k] = sol.beta[k] * z[k];
    } else {
        std::vector<size_t> idx2(2 * ntr);
        std::vector<double> targets(ntr);
        for (size_t k = 0; k < ntr; ++k) {
            idx2[k] = train_idx[k];
            idx2[k + ntr] = train_idx[k];
            targets[k] = y[train_idx[k]];
        }
        std::vector<double> p2, z2;
        detail::svr_doubled_terms(targets, cfg.tube_epsilon, p2, z2);
        detail::GramSubsetQ q(gram, idx2, z2);
        auto sol = detail::smo_solve(q, p2, z2, cfg.c, cfg.solver_tol, cfg.max_iter);
        for (size_t k = 0; k < ntr; ++k) coef[k] = sol.beta[k] - sol.beta[k + ntr];
    }
    out.t_train = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto decision = [&](size_t global) {
        double acc = 0.0;
        const double* g = gram.row(global);
        for (size_t k = 0; k < ntr; ++k) acc += coef[k] * g[train_idx[k]];
        return acc;
    };

    double wn2 = 0.0;
    for (size_t a = 0; a < ntr; ++a) {
        const double* g = gram.row(train_idx[a]);
        double acc = 0.0;
        for (size_t b = 0; b < ntr; ++b) acc += coef[b] * g[train_idx[b]];
        wn2 += coef[a] * acc;
    }
    out.gamma = wn2 > 0.0 ? 1.0 / std::sqrt(wn2) : 0.0;

    std::vector<double> pred_in(ntr), truth_in(ntr);
    for (size_t k = 0; k < ntr; ++k) {
        pred_in[k] = decision(train_idx[k]);
        truth_in[k] = y[train_idx[k]];
    }
    std::vector<double> pred_out(test_idx.size()), truth_out(test_idx.size());
    for (size_t k = 0; k < test_idx.size(); ++k) {
        pred_out[k] = decision(test_idx[k]);
        truth_out[k] = y[test_idx[k]];
    }
    if (cfg.task == SvmTask::classify) {
        out.eps_in = metrics(pred_in, truth_in, SvmTask::classify).error_percent;
        out.eps_out = metrics(pred_out, truth_out, SvmTask::classify).error_percent;
    } else {
        MetricRecord in = metrics(pred_in, truth_in, SvmTask::regress);
        out.mse = in.mse;
        out.beta = in.beta;
        MetricRecord holdout = metrics(pred_out, truth_out, SvmTask::regress);
        out.eps_out = holdout.mse;  // kept in the raw log only
    }
    return out;
}

struct Variant {
    std::string kind_label;
    SketchKind kind = SketchKind::gaussian;
    bool is_full = false;
    size_t r = 0;
    size_t sketch_rep = 0;
    uint64_t op_seed = 0;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() <= 1) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentReport run_experiment(const DataMatrix& x, const std::vector<double>& y,
                                const ExperimentConfig& cfg) {
    const size_t n = x.rows();
    if (y.size() != n) throw std::invalid_argument("run_experiment: label count mismatch");
    if (cfg.folds < 2) throw std::invalid_argument("run_experiment: folds must be >= 2");
    if (n < cfg.folds) throw std::invalid_argument("run_experiment: need n >= folds");
    if (cfg.cv_reps < 1 || cfg.sketch_reps < 1) {
        throw std::invalid_argument("run_experiment: repetition counts must be >= 1");
    }
    if (cfg.task == SvmTask::classify) {
        for (double yi : y) {
            if (yi != 1.0 && yi != -1.0) {
                throw std::invalid_argument("run_experiment: classification labels must be +-1");
            }
        }
    }
    for (size_t r : cfg.r_values) {
        if (r < 1) throw std::invalid_argument("run_experiment: r values must be >= 1");
    }
    if (n > 4096) throw capacity_error("run_experiment: n exceeds the desk-scale Gram cap (4096)");

    // Fold assignments, shared across variants.
    std::vector<std::vector<size_t>> perms(cfg.cv_reps);
    for (size_t rep = 0; rep < cfg.cv_reps; ++rep) {
        perms[rep].resize(n);
        for (size_t i = 0; i < n; ++i) perms[rep][i] = i;
        rng::Stream s(cfg.seed, kSaltFolds + rep);
        rng::shuffle(perms[rep].data(), n, s);
    }
    auto fold_split = [&](size_t rep, size_t fold, std::vector<size_t>& train,
                          std::vector<size_t>& test) {
        size_t lo = n * fold / cfg.folds;
        size_t hi = n * (fold + 1) / cfg.folds;
        train.clear();
        test.clear();
        for (size_t i = 0; i < n; ++i) {
            if (i >= lo && i < hi) {
                test.push_back(perms[rep][i]);
            } else {
                train.push_back(perms[rep][i]);
            }
        }
    };

    std::vector<Variant> variants;
    if (cfg.include_full) {
        Variant v;
        v.kind_label = "full";
        v.is_full = true;
        v.r = x.cols();
        variants.push_back(v);
    }
    rng::Stream opseed(cfg.seed, kSaltOpSeed);
    for (SketchKind kind : cfg.kinds) {
        for (size_t r : cfg.r_values) {
            for (size_t rep = 0; rep < cfg.sketch_reps; ++rep) {
                Variant v;
                v.kind = kind;
                v.kind_label = kind_name(kind);
                v.r = r;
                v.sketch_rep = rep;
                v.op_seed = opseed.u64((static_cast<uint64_t>(kind) << 40) ^
                                       (static_cast<uint64_t>(r) << 16) ^ rep);
                variants.push_back(v);
            }
        }
    }

    const size_t runs_per_variant = cfg.cv_reps * cfg.folds;
    ExperimentReport report;
    report.raw.resize(variants.size() * runs_per_variant);

    parallel_for(0, variants.size(), [&](size_t vi) {
        const Variant& var = variants[vi];
        DenseMatrix gram;
        double t_rp = 0.0;
        if (var.is_full) {
            gram = gram_rows(x);
        } else {
            SketchOptions options;
            options.cw_mode = cfg.cw_mode;
            SketchOperator op = build_sketch(var.kind, x.cols(), var.r, var.op_seed, options);
            SketchReport srep;
            DenseMatrix sk = apply_sketch(op, x, &srep);
            t_rp = srep.t_rp_seconds;
            gram = gram_rows(DataMatrix(std::move(sk)));
        }
        std::vector<size_t> train, test;
        for (size_t rep = 0; rep < cfg.cv_reps; ++rep) {
            for (size_t fold = 0; fold < cfg.folds; ++fold) {
                fold_split(rep, fold, train, test);
                FoldOutcome oc = run_fold(gram, y, train, test, cfg);
                RunRecord& rec = report.raw[vi * runs_per_variant + rep * cfg.folds + fold];
                rec.kind = var.kind_label;
                rec.r = var.r;
                rec.sketch_rep = var.sketch_rep;
                rec.cv_rep = rep;
                rec.fold = fold;
                rec.skipped = oc.skipped;
                rec.eps_in = oc.eps_in;
                rec.eps_out = oc.eps_out;
                rec.mse = oc.mse;
                rec.beta = oc.beta;
                rec.gamma = oc.gamma;
                rec.t_rp = t_rp;
                rec.t_train = oc.t_train;
                rec.n_train = oc.n_train;
                rec.n_test = oc.n_test;
            }
        }
    });

    // Aggregate: one experiment unit per (kind, r, sketch_rep, cv_rep).
    struct UnitKey {
        std::string kind;
        size_t r, srep, crep;
        bool operator<(const UnitKey& o) const {
            return std::tie(kind, r, srep, crep) < std::tie(o.kind, o.r, o.srep, o.crep);
        }
    };
    struct UnitAgg {
        double err_weighted = 0.0;
        size_t tested = 0;
        std::vector<double> eps_in, gamma, mse, beta;
        double t_rp = 0.0, t_train_sum = 0.0;
        size_t used_folds = 0;
    };
    std::map<UnitKey, UnitAgg> units;
    for (const RunRecord& rec : report.raw) {
        UnitAgg& u = units[UnitKey{rec.kind, rec.r, rec.sketch_rep, rec.cv_rep}];
        u.t_rp = rec.t_rp;
        if (rec.skipped) continue;
        u.err_weighted += rec.eps_out * static_cast<double>(rec.n_test);
        u.tested += rec.n_test;
        u.eps_in.push_back(rec.eps_in);
        u.gamma.push_back(rec.gamma);
        u.mse.push_back(rec.mse);
        u.beta.push_back(rec.beta);
        u.t_train_sum += rec.t_train;
        u.used_folds += 1;
    }

    struct CellKey {
        std::string kind;
        size_t r;
        bool operator<(const CellKey& o) const { return std::tie(kind, r) < std::tie(o.kind, o.r); }
    };
    std::map<CellKey, std::map<std::string, std::vector<double>>> cells;
    for (const auto& [key, u] : units) {
        if (u.used_folds == 0) continue;
        auto& cell = cells[CellKey{key.kind, key.r}];
        if (cfg.task == SvmTask::classify) {
            cell["eps_in"].push_back(mean_of(u.eps_in));
            cell["eps_out"].push_back(u.tested > 0 ? u.err_weighted / static_cast<double>(u.tested)
                                                   : 0.0);
        } else {
            cell["mse"].push_back(mean_of(u.mse));
            cell["beta"].push_back(mean_of(u.beta));
        }
        cell["gamma"].push_back(mean_of(u.gamma));
        cell["t_rp"].push_back(u.t_rp);
        cell["t_run"].push_back(u.t_rp + u.t_train_sum);
    }
    for (const auto& [key, metricsmap] : cells) {
        for (const auto& [metric, values] : metricsmap) {
            CellRow row;
            row.kind = key.kind;
            row.r = key.r;
            row.metric = metric;
            row.mean = mean_of(values);
            row.stddev = sample_std(values);
            report.rows.push_back(row);
        }
    }
    return report;
}

DenseMatrix pca_features(const DataMatrix& x, size_t k) {
    if (k < 1) throw std::invalid_argument("pca_features: k must be >= 1");
    DenseMatrix xc = x.to_dense();
    size_t n = xc.rows, d = xc.cols;
    if (n < 1) throw std::invalid_argument("pca_features: empty matrix");
    std::vector<double> mean(d, 0.0);
    for (size_t i = 0; i < n; ++i) simd::axpy(1.0 / static_cast<double>(n), xc.row(i), mean.data(), d);
    for (size_t i = 0; i < n; ++i) simd::axpy(-1.0, mean.data(), xc.row(i), d);

    SvdFactors f = svd_thin(xc);
    if (k > f.rank) {
        throw std::invalid_argument("pca_features: k = " + std::to_string(k) +
                                    " exceeds numerical rank " + std::to_string(f.rank));
    }
    DenseMatrix vk(d, k);
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < k; ++j) vk.at(i, j) = f.v.at(i, j);
    }
    return matmul(xc, vk);
}

}  // namespace rpsvm
