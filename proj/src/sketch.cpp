#include "rpsvm/sketch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rpsvm/errors.hpp"
#include "rpsvm/linalg.hpp"
#include "rpsvm/parallel.hpp"
#include "rpsvm/rng.hpp"
#include "rpsvm/simd.hpp"

namespace rpsvm {

namespace {

// Sub-stream salts; each derived quantity draws from its own stream.
constexpr uint64_t kSaltSrhtSign = 1;
constexpr uint64_t kSaltSrhtSample = 2;
constexpr uint64_t kSaltCsBucket = 3;
constexpr uint64_t kSaltCsSign = 4;
constexpr uint64_t kSaltSignEntry = 5;
constexpr uint64_t kSaltGaussEntry = 6;
constexpr uint64_t kSaltBlockBucket = 7;
constexpr uint64_t kSaltBlockRow = 8;
constexpr uint64_t kSaltBlockSign = 9;

size_t next_pow2(size_t d) {
    size_t p = 1;
    while (p < d) p <<= 1;
    return p;
}

}  // namespace

std::string kind_name(SketchKind k) {
    switch (k) {
        case SketchKind::srht: return "srht";
        case SketchKind::cw: return "cw";
        case SketchKind::sign: return "sign";
        case SketchKind::gaussian: return "gaussian";
    }
    return "?";
}

SketchKind kind_from_name(const std::string& name) {
    if (name == "srht" || name == "fht") return SketchKind::srht;
    if (name == "cw") return SketchKind::cw;
    if (name == "sign" || name == "rs") return SketchKind::sign;
    if (name == "gaussian" || name == "rg") return SketchKind::gaussian;
    throw std::invalid_argument("unknown sketch kind: " + name);
}

size_t recommend_r(SketchKind kind, size_t rho, size_t d, double epsilon, double delta) {
    if (rho < 1) throw std::invalid_argument("recommend_r: rho must be >= 1");
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw std::invalid_argument("recommend_r: epsilon must be in (0, 0.5]");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("recommend_r: delta must be in (0, 1)");
    }
    double p = static_cast<double>(rho);
    double dd = static_cast<double>(d);
    double e2 = epsilon * epsilon;
    double value = 0.0;
    switch (kind) {
        case SketchKind::srht: {
            if (d < 1) throw std::invalid_argument("recommend_r: d must be >= 1");
            double l1 = std::log(p * dd / delta);
            double l2 = std::log(p / (e2 * delta) * l1);
            value = p / e2 * l1 * l2;
            break;
        }
        case SketchKind::cw:
            value = p / (e2 * e2) * std::log(p / (delta * epsilon)) *
                    (p + std::log(1.0 / (delta * epsilon)));
            break;
        case SketchKind::sign:
            if (d < 1) throw std::invalid_argument("recommend_r: d must be >= 1");
            value = p / e2 * std::log(p) * std::log(dd);
            break;
        case SketchKind::gaussian:
            value = p / e2 * std::log(p / delta);
            break;
    }
    if (!(value >= 1.0)) return 1;
    return static_cast<size_t>(std::ceil(value));
}

SketchOperator build_sketch(SketchKind kind, size_t d, size_t r, uint64_t seed,
                            const SketchOptions& options) {
    if (d < 1 || r < 1) throw std::invalid_argument("build_sketch: d and r must be >= 1");
    SketchOperator op;
    op.kind = kind;
    op.d = d;
    op.r = r;
    op.seed = seed;
    op.options = options;
    switch (kind) {
        case SketchKind::srht: {
            op.d_pad = next_pow2(d);
            rng::Stream signs(seed, kSaltSrhtSign);
            op.srht_signs.resize(op.d_pad);
            for (size_t i = 0; i < op.d_pad; ++i) op.srht_signs[i] = signs.sign(i);
            rng::Stream samp(seed, kSaltSrhtSample);
            op.srht_samples.resize(r);
            if (options.srht_without_replacement) {
                if (r > op.d_pad) {
                    throw std::invalid_argument(
                        "build_sketch: without-replacement sampling needs r <= padded d");
                }
                std::vector<uint32_t> perm(op.d_pad);
                for (size_t i = 0; i < op.d_pad; ++i) perm[i] = static_cast<uint32_t>(i);
                rng::shuffle(perm.data(), perm.size(), samp);
                std::copy(perm.begin(), perm.begin() + r, op.srht_samples.begin());
            } else {
                for (size_t j = 0; j < r; ++j) {
                    op.srht_samples[j] = static_cast<uint32_t>(samp.index(j, op.d_pad));
                }
            }
            op.srht_unique = op.srht_samples;
            std::sort(op.srht_unique.begin(), op.srht_unique.end());
            op.srht_unique.erase(std::unique(op.srht_unique.begin(), op.srht_unique.end()),
                                 op.srht_unique.end());
            op.srht_slot.resize(r);
            for (size_t j = 0; j < r; ++j) {
                op.srht_slot[j] = static_cast<uint32_t>(
                    std::lower_bound(op.srht_unique.begin(), op.srht_unique.end(),
                                     op.srht_samples[j]) -
                    op.srht_unique.begin());
            }
            break;
        }
        case SketchKind::cw: {
            if (options.cw_mode == CwMode::countsketch) {
                rng::Stream bucket(seed, kSaltCsBucket);
                rng::Stream sgn(seed, kSaltCsSign);
                op.cs_bucket.resize(d);
                op.cs_sign.resize(d);
                for (size_t j = 0; j < d; ++j) {
                    op.cs_bucket[j] = static_cast<uint32_t>(bucket.index(j, r));
                    op.cs_sign[j] = sgn.sign(j);
                }
            } else {
                size_t a = options.block_a;
                size_t v = options.block_v;
                if (a * v > r) {
                    a = 1;
                    v = 1;
                }
                size_t q = r / (a * v);
                op.options.block_a = a;
                op.options.block_v = v;
                rng::Stream bucket(seed, kSaltBlockBucket);
                rng::Stream rows(seed, kSaltBlockRow);
                rng::Stream sgn(seed, kSaltBlockSign);
                op.block_rows.resize(d * a);
                op.block_vals.resize(d * a);
                double scale = 1.0 / std::sqrt(static_cast<double>(a));
                for (size_t j = 0; j < d; ++j) {
                    size_t b = bucket.index(j, q);
                    for (size_t t = 0; t < a; ++t) {
                        size_t phi = rows.index(j * a + t, v);
                        op.block_rows[j * a + t] =
                            static_cast<uint32_t>(b * (v * a) + t * v + phi);
                        op.block_vals[j * a + t] = scale * sgn.sign(j * a + t);
                    }
                }
            }
            break;
        }
        case SketchKind::sign:
        case SketchKind::gaussian:
            break;  // generated streamwise on use
    }
    return op;
}

namespace {

double sign_entry(const rng::Stream& s, size_t k, size_t r, size_t j, double inv_sqrt_r) {
    return s.sign(k * r + j) * inv_sqrt_r;
}

double gauss_entry(const rng::Stream& s, size_t k, size_t r, size_t j, double inv_sqrt_r) {
    return s.normal(k * r + j) * inv_sqrt_r;
}

void apply_srht(const SketchOperator& op, const DataMatrix& x, DenseMatrix& out) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(op.r));
    const size_t nu = op.srht_unique.size();
    parallel_for(0, x.rows(), [&](size_t i) {
        static thread_local std::vector<double> buf;
        static thread_local std::vector<double> picked;
        buf.assign(op.d_pad, 0.0);
        picked.resize(nu);
        x.for_each_in_row(i, [&](uint32_t c, double v) { buf[c] = v * op.srht_signs[c]; });
        hadamard_subset(buf.data(), op.d_pad, op.srht_unique.data(), nu, picked.data());
        double* o = out.row(i);
        for (size_t j = 0; j < op.r; ++j) o[j] = scale * picked[op.srht_slot[j]];
    });
}

void apply_countsketch(const SketchOperator& op, const DataMatrix& x, DenseMatrix& out) {
    parallel_for(0, x.rows(), [&](size_t i) {
        double* o = out.row(i);
        x.for_each_in_row(i, [&](uint32_t c, double v) { o[op.cs_bucket[c]] += op.cs_sign[c] * v; });
    });
}

void apply_block(const SketchOperator& op, const DataMatrix& x, DenseMatrix& out) {
    const size_t a = op.options.block_a;
    parallel_for(0, x.rows(), [&](size_t i) {
        double* o = out.row(i);
        x.for_each_in_row(i, [&](uint32_t c, double v) {
            size_t base = static_cast<size_t>(c) * a;
            for (size_t t = 0; t < a; ++t) o[op.block_rows[base + t]] += op.block_vals[base + t] * v;
        });
    });
}

template <typename EntryFn>
void apply_streamwise(const SketchOperator& op, const DataMatrix& x, DenseMatrix& out,
                      uint64_t salt, EntryFn entry) {
    rng::Stream s(op.seed, salt);
    const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(op.r));
    const size_t r = op.r;
    if (x.is_sparse()) {
        parallel_for(0, x.rows(), [&](size_t i) {
            double* o = out.row(i);
            x.for_each_in_row(i, [&](uint32_t c, double v) {
                for (size_t j = 0; j < r; ++j) o[j] += v * entry(s, c, r, j, inv_sqrt_r);
            });
        });
        return;
    }
    // Dense input: stage panels of projection rows, then accumulate with axpy.
    const DenseMatrix& xd = x.dense();
    const size_t panel = 256;
    std::vector<double> rp(std::min(panel, op.d) * r);
    for (size_t k0 = 0; k0 < op.d; k0 += panel) {
        size_t kn = std::min(panel, op.d - k0);
        parallel_for(0, kn, [&](size_t kk) {
            double* row = rp.data() + kk * r;
            for (size_t j = 0; j < r; ++j) row[j] = entry(s, k0 + kk, r, j, inv_sqrt_r);
        });
        parallel_for(0, xd.rows, [&](size_t i) {
            const double* xi = xd.row(i);
            double* o = out.row(i);
            for (size_t kk = 0; kk < kn; ++kk) {
                double v = xi[k0 + kk];
                if (v != 0.0) simd::axpy(v, rp.data() + kk * r, o, r);
            }
        });
    }
}

}  // namespace

DenseMatrix apply_sketch(const SketchOperator& op, const DataMatrix& x, SketchReport* report) {
    if (x.cols() != op.d) {
        throw std::invalid_argument("apply_sketch: data has " + std::to_string(x.cols()) +
                                    " columns, operator expects " + std::to_string(op.d));
    }
    DenseMatrix out(x.rows(), op.r);
    auto t0 = std::chrono::steady_clock::now();
    switch (op.kind) {
        case SketchKind::srht:
            apply_srht(op, x, out);
            break;
        case SketchKind::cw:
            if (op.options.cw_mode == CwMode::countsketch) {
                apply_countsketch(op, x, out);
            } else {
                apply_block(op, x, out);
            }
            break;
        case SketchKind::sign:
            apply_streamwise(op, x, out, kSaltSignEntry, sign_entry);
            break;
        case SketchKind::gaussian:
            apply_streamwise(op, x, out, kSaltGaussEntry, gauss_entry);
            break;
    }
    auto t1 = std::chrono::steady_clock::now();
    if (report != nullptr) {
        report->t_rp_seconds = std::chrono::duration<double>(t1 - t0).count();
        report->input_nnz = x.nnz();
        size_t onnz = 0;
        for (double v : out.data) onnz += (v != 0.0);
        report->output_nnz = onnz;
        report->r = op.r;
        report->kind = op.kind;
    }
    return out;
}

DenseMatrix materialize(const SketchOperator& op, size_t entry_cap) {
    if (op.d * op.r > entry_cap) {
        throw capacity_error("materialize: d*r = " + std::to_string(op.d * op.r) +
                             " exceeds cap " + std::to_string(entry_cap));
    }
    DenseMatrix m(op.d, op.r);
    const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(op.r));
    switch (op.kind) {
        case SketchKind::srht:
            for (size_t i = 0; i < op.d; ++i) {
                for (size_t j = 0; j < op.r; ++j) {
                    uint32_t s = op.srht_samples[j];
                    double h = (__builtin_popcountll(i & s) & 1) ? -1.0 : 1.0;
                    m.at(i, j) = inv_sqrt_r * op.srht_signs[i] * h;
                }
            }
            break;
        case SketchKind::cw:
            if (op.options.cw_mode == CwMode::countsketch) {
                for (size_t i = 0; i < op.d; ++i) m.at(i, op.cs_bucket[i]) = op.cs_sign[i];
            } else {
                size_t a = op.options.block_a;
                for (size_t i = 0; i < op.d; ++i) {
                    for (size_t t = 0; t < a; ++t) {
                        m.at(i, op.block_rows[i * a + t]) += op.block_vals[i * a + t];
                    }
                }
            }
            break;
        case SketchKind::sign: {
            rng::Stream s(op.seed, kSaltSignEntry);
            for (size_t i = 0; i < op.d; ++i) {
                for (size_t j = 0; j < op.r; ++j) m.at(i, j) = sign_entry(s, i, op.r, j, inv_sqrt_r);
            }
            break;
        }
        case SketchKind::gaussian: {
            rng::Stream s(op.seed, kSaltGaussEntry);
            for (size_t i = 0; i < op.d; ++i) {
                for (size_t j = 0; j < op.r; ++j) m.at(i, j) = gauss_entry(s, i, op.r, j, inv_sqrt_r);
            }
            break;
        }
    }
    return m;
}

std::string sketch_to_json(const SketchOperator& op) {
    nlohmann::json j;
    j["kind"] = kind_name(op.kind);
    j["d"] = op.d;
    j["r"] = op.r;
    j["seed"] = op.seed;
    if (op.kind == SketchKind::cw) {
        j["mode"] = op.options.cw_mode == CwMode::block ? "block" : "countsketch";
        if (op.options.cw_mode == CwMode::block) {
            j["block_a"] = op.options.block_a;
            j["block_v"] = op.options.block_v;
        }
    }
    if (op.kind == SketchKind::srht && op.options.srht_without_replacement) {
        j["srht_without_replacement"] = true;
    }
    return j.dump();
}

SketchOperator sketch_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SketchOptions opts;
    if (j.contains("mode") && j["mode"] == "block") opts.cw_mode = CwMode::block;
    if (j.contains("block_a")) opts.block_a = j["block_a"].get<size_t>();
    if (j.contains("block_v")) opts.block_v = j["block_v"].get<size_t>();
    if (j.value("srht_without_replacement", false)) opts.srht_without_replacement = true;
    return build_sketch(kind_from_name(j.at("kind").get<std::string>()), j.at("d").get<size_t>(),
                        j.at("r").get<size_t>(), j.at("seed").get<uint64_t>(), opts);
}

}  // namespace rpsvm
