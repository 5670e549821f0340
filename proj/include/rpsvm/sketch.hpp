#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpsvm/matrix.hpp"

namespace rpsvm {

enum class SketchKind { srht, cw, sign, gaussian };

enum class CwMode { countsketch, block };

std::string kind_name(SketchKind k);
SketchKind kind_from_name(const std::string& name);

struct SketchOptions {
    CwMode cw_mode = CwMode::countsketch;
    // Test support: sample SRHT columns without replacement (a random
    // permutation prefix), which makes R orthogonal when r equals the padded
    // dimension.
    bool srht_without_replacement = false;
    // Block-mode shape: each input coordinate gets block_a nonzeros spread
    // over sub-blocks of height block_v; bucket count is r / (a*v).
    size_t block_a = 4;
    size_t block_v = 2;
};

// One of the four oblivious projections R in R^{d x r}. Deterministic in
// (kind, d, r, seed): the derived state is a pure function of the seed, so
// two builds with identical arguments apply identically.
struct SketchOperator {
    SketchKind kind = SketchKind::gaussian;
    size_t d = 0;
    size_t r = 0;
    uint64_t seed = 0;
    SketchOptions options;

    // SRHT: R = sqrt(d_pad/r) * D * H * S over the zero-padded dimension.
    size_t d_pad = 0;
    std::vector<double> srht_signs;          // +-1, length d_pad
    std::vector<uint32_t> srht_samples;      // r sampled columns
    std::vector<uint32_t> srht_unique;       // sorted unique samples
    std::vector<uint32_t> srht_slot;         // sample j -> position in srht_unique

    // CW countsketch: one +-1 per input dimension.
    std::vector<uint32_t> cs_bucket;  // length d
    std::vector<double> cs_sign;      // length d

    // CW block mode: per input dimension, block_a (row, value) pairs.
    std::vector<uint32_t> block_rows;  // d * block_a
    std::vector<double> block_vals;    // d * block_a
};

struct SketchReport {
    double t_rp_seconds = 0.0;
    size_t input_nnz = 0;
    size_t output_nnz = 0;
    size_t r = 0;
    SketchKind kind = SketchKind::gaussian;
};

// Sampling-complexity recommendation with all big-O constants set to one and
// natural logarithms, rounded up and clamped to >= 1. `d` participates only
// in the SRHT and sign formulas.
size_t recommend_r(SketchKind kind, size_t rho, size_t d, double epsilon, double delta);

SketchOperator build_sketch(SketchKind kind, size_t d, size_t r, uint64_t seed,
                            const SketchOptions& options = {});

// X~ = X R. Output is dense n x r.
DenseMatrix apply_sketch(const SketchOperator& op, const DataMatrix& x,
                         SketchReport* report = nullptr);

// Explicit d x r matrix with apply_sketch(op, X) == X * materialize(op).
DenseMatrix materialize(const SketchOperator& op, size_t entry_cap = size_t{1} << 24);

// JSON descriptor {kind, d, r, seed, mode}; derived state is rebuilt from the
// seed on load.
std::string sketch_to_json(const SketchOperator& op);
SketchOperator sketch_from_json(const std::string& text);

}  // namespace rpsvm
