#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpsvm/matrix.hpp"
#include "rpsvm/sketch.hpp"
#include "rpsvm/svm.hpp"

namespace rpsvm {

struct SyntheticSpec {
    size_t n = 0;
    size_t d = 0;
    double mu = 0.0;
    double sigma = 1.0;
    uint64_t seed = 0;
};

struct SyntheticData {
    DenseMatrix x;
    std::vector<double> y;
};

// Gaussian features, labels sign(w_hat . x) for a normalized random weight
// vector with N(mu, sigma) entries; separable by construction. sign(0) -> +1.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Same features; targets w_hat . x plus uniform noise in [-hw, +hw].
SyntheticData generate_synthetic_regression(const SyntheticSpec& spec, double noise_half_width);

// Desk-scale presets: d1 = 200x2048 N(0,1), d2 = 250x4096 N(1,1.5),
// d3 = 300x8192 N(2,2).
SyntheticSpec synthetic_preset(const std::string& name, uint64_t seed);

struct MetricRecord {
    double error_percent = 0.0;  // classification
    double mse = 0.0;            // regression
    double beta = 0.0;           // squared Pearson correlation
};

MetricRecord metrics(const std::vector<double>& predictions, const std::vector<double>& truth,
                     SvmTask task);

struct ExperimentConfig {
    std::vector<SketchKind> kinds = {SketchKind::srht, SketchKind::cw, SketchKind::sign,
                                     SketchKind::gaussian};
    std::vector<size_t> r_values;
    CwMode cw_mode = CwMode::countsketch;
    SvmTask task = SvmTask::classify;
    double c = 1000.0;
    double tube_epsilon = 0.1;
    double solver_tol = 1e-5;
    uint64_t max_iter = 10'000'000;
    size_t folds = 10;
    size_t cv_reps = 10;
    size_t sketch_reps = 10;
    bool include_full = true;
    uint64_t seed = 0;
};

// One row of the raw per-fold log.
struct RunRecord {
    std::string kind;
    size_t r = 0;
    size_t sketch_rep = 0;
    size_t cv_rep = 0;
    size_t fold = 0;
    bool skipped = false;  // single-class training fold
    double eps_in = 0.0;
    double eps_out = 0.0;
    double mse = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double t_rp = 0.0;
    double t_train = 0.0;
    size_t n_train = 0;
    size_t n_test = 0;
};

struct CellRow {
    std::string kind;
    size_t r = 0;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;  // sample stddev over experiment units, 0 for N <= 1
};

struct ExperimentReport {
    std::vector<CellRow> rows;
    std::vector<RunRecord> raw;
};

// Cross-validation harness: for each (kind, r, sketch seed) the data is
// sketched once, then folds x cv_reps SVMs are trained on the sketched Gram.
// Aggregates mean/stddev over (sketch_rep, cv_rep) experiment units.
ExperimentReport run_experiment(const DataMatrix& x, const std::vector<double>& y,
                                const ExperimentConfig& cfg);

// Z = X_c V_k for the centered data matrix; k must not exceed numerical rank.
DenseMatrix pca_features(const DataMatrix& x, size_t k);

}  // namespace rpsvm
