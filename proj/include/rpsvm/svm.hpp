#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rpsvm/matrix.hpp"

namespace rpsvm {

enum class SvmTask { classify, regress };

struct SvcProblem {
    DataMatrix x;
    std::vector<double> y;  // labels in {-1, +1}
    double c = 1.0;
};

struct SvrProblem {
    DataMatrix x;
    std::vector<double> y;  // real targets
    double c = 1.0;
    double tube_epsilon = 0.1;
};

struct SolverOptions {
    double tol = 1e-6;
    uint64_t max_iter = 10'000'000;
    size_t gram_cap = 4096;               // precompute X X^T when n <= cap
    const DenseMatrix* gram = nullptr;    // optional caller-provided X X^T
    // Called periodically with (iteration, dual objective in max form).
    std::function<void(uint64_t, double)> objective_hook;
    uint64_t hook_every = 1;
};

struct SvmModel {
    SvmTask task = SvmTask::classify;
    double c = 1.0;
    std::vector<double> alphas;
    std::vector<double> w;
    double gamma = 0.0;      // 1/||w||, 0 when w == 0
    double objective = 0.0;  // dual objective (max form) at termination
    double kkt_violation = 0.0;
    bool converged = false;
    std::vector<size_t> support_indices;
    double train_seconds = 0.0;
};

SvmModel train_svc(const SvcProblem& p, const SolverOptions& opts = {});
SvmModel train_svr(const SvrProblem& p, const SolverOptions& opts = {});

// Decision values / regression outputs: X_new * w.
std::vector<double> predict(const SvmModel& model, const DataMatrix& x_new);

// Geometric margin 1/||w||; throws undefined_margin_error when w == 0.
double margin(const SvmModel& model);

std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& text);

namespace detail {

// Column access to the quadratic term of a dual problem.
class QSource {
public:
    virtual ~QSource() = default;
    virtual size_t size() const = 0;
    virtual void column(size_t j, double* out) const = 0;
    virtual double diag(size_t j) const = 0;
};

// Q over a row subset of a precomputed Gram matrix, with sign labels folded
// in: Q[i][j] = z_i z_j G[idx_i][idx_j].
class GramSubsetQ final : public QSource {
public:
    GramSubsetQ(const DenseMatrix& gram, std::vector<size_t> idx, std::vector<double> z);
    size_t size() const override { return idx_.size(); }
    void column(size_t j, double* out) const override;
    double diag(size_t j) const override;

private:
    const DenseMatrix& gram_;
    std::vector<size_t> idx_;
    std::vector<double> z_;
};

struct SmoResult {
    std::vector<double> beta;
    double kkt_violation = 0.0;
    bool converged = false;
    uint64_t iterations = 0;
};

// SMO on: minimize 0.5 b'Qb + p'b  s.t.  sum_i z_i b_i = 0, 0 <= b <= C,
// with maximal-violating-pair selection and lowest-index tie breaking.
SmoResult smo_solve(const QSource& q, const std::vector<double>& p, const std::vector<double>& z,
                    double c, double tol, uint64_t max_iter,
                    const std::function<void(uint64_t, double)>& hook = nullptr,
                    uint64_t hook_every = 1);

// Doubled-variable mapping used by the regression path: z and p for the
// 2n-variable box problem equivalent to the epsilon-insensitive dual.
void svr_doubled_terms(const std::vector<double>& targets, double tube, std::vector<double>& p,
                       std::vector<double>& z);

}  // namespace detail

}  // namespace rpsvm
