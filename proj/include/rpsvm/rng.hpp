#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rpsvm::rng {

// Counter-based generator: every draw is a pure function of (seed, salt,
// counter), so parallel consumers produce identical values regardless of
// scheduling or thread count.

inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

class Stream {
public:
    explicit Stream(uint64_t seed, uint64_t salt = 0)
        : key_(mix64(seed + kGolden) ^ mix64(salt * kGolden + 1)) {}

    uint64_t u64(uint64_t ctr) const { return mix64(key_ + ctr * kGolden); }

    // Uniform in [0,1).
    double unit(uint64_t ctr) const {
        return static_cast<double>(u64(ctr) >> 11) * 0x1.0p-53;
    }

    // Uniform in (0,1]; safe as a log() argument.
    double unit_pos(uint64_t ctr) const {
        return static_cast<double>((u64(ctr) >> 11) + 1) * 0x1.0p-53;
    }

    double sign(uint64_t ctr) const { return (u64(ctr) >> 63) ? -1.0 : 1.0; }

    // Standard normal via Box-Muller; consumes counters 2*ctr and 2*ctr+1.
    double normal(uint64_t ctr) const {
        double u1 = unit_pos(2 * ctr);
        double u2 = unit(2 * ctr + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform index in [0, n), n >= 1.
    uint64_t index(uint64_t ctr, uint64_t n) const {
        return static_cast<uint64_t>(
            (static_cast<__uint128_t>(u64(ctr)) * static_cast<__uint128_t>(n)) >> 64);
    }

private:
    uint64_t key_;
};

// In-place Fisher-Yates shuffle of idx[0..n), deterministic in (stream, ctr0).
template <typename T>
void shuffle(T* idx, size_t n, const Stream& s, uint64_t ctr0 = 0) {
    for (size_t i = n; i > 1; --i) {
        size_t j = static_cast<size_t>(s.index(ctr0 + i, i));
        T tmp = idx[i - 1];
        idx[i - 1] = idx[j];
        idx[j] = tmp;
    }
}

}  // namespace rpsvm::rng
