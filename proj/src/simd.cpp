#include "rpsvm/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define RPSVM_X86 1
#include <immintrin.h>
#else
#define RPSVM_X86 0
#endif

namespace rpsvm::simd {

namespace {

// ---------------------------------------------------------------- scalar

double dot_scalar(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void butterfly_scalar(double* a, double* b, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        double t = a[i];
        a[i] = t + b[i];
        b[i] = t - b[i];
    }
}

void rot_scalar(double* x, double* y, double c, double s, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        double xi = x[i];
        double yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = -s * xi + c * yi;
    }
}

// ---------------------------------------------------------------- avx2

#if RPSVM_X86

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma"))) void scal_avx2(double alpha, double* x, size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

__attribute__((target("avx2,fma"))) void butterfly_avx2(double* a, double* b, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(a + i, _mm256_add_pd(va, vb));
        _mm256_storeu_pd(b + i, _mm256_sub_pd(va, vb));
    }
    for (; i < n; ++i) {
        double t = a[i];
        a[i] = t + b[i];
        b[i] = t - b[i];
    }
}

__attribute__((target("avx2,fma"))) void rot_avx2(double* x, double* y, double c, double s, size_t n) {
    __m256d vc = _mm256_set1_pd(c);
    __m256d vs = _mm256_set1_pd(s);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vc, vx, _mm256_mul_pd(vs, vy)));
        _mm256_storeu_pd(y + i, _mm256_fmsub_pd(vc, vy, _mm256_mul_pd(vs, vx)));
    }
    for (; i < n; ++i) {
        double xi = x[i];
        double yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = -s * xi + c * yi;
    }
}

#endif  // RPSVM_X86

struct Kernels {
    double (*dot)(const double*, const double*, size_t);
    void (*axpy)(double, const double*, double*, size_t);
    void (*scal)(double, double*, size_t);
    void (*butterfly)(double*, double*, size_t);
    void (*rot)(double*, double*, double, double, size_t);
};

constexpr Kernels kScalar{dot_scalar, axpy_scalar, scal_scalar, butterfly_scalar, rot_scalar};

#if RPSVM_X86
constexpr Kernels kAvx2{dot_avx2, axpy_avx2, scal_avx2, butterfly_avx2, rot_avx2};
#endif

bool avx2_supported() {
#if RPSVM_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

IsaLevel detect_level() {
    const char* env = std::getenv("RPSVM_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return IsaLevel::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return IsaLevel::avx2;
    }
    return avx2_supported() ? IsaLevel::avx2 : IsaLevel::scalar;
}

std::atomic<const Kernels*> g_kernels{nullptr};
std::atomic<IsaLevel> g_level{IsaLevel::scalar};

const Kernels& kernels() {
    const Kernels* k = g_kernels.load(std::memory_order_acquire);
    if (k == nullptr) {
        force_level(detect_level());
        k = g_kernels.load(std::memory_order_acquire);
    }
    return *k;
}

}  // namespace

IsaLevel active_level() {
    kernels();
    return g_level.load(std::memory_order_acquire);
}

void force_level(IsaLevel level) {
#if RPSVM_X86
    if (level == IsaLevel::avx2 && avx2_supported()) {
        g_level.store(IsaLevel::avx2, std::memory_order_release);
        g_kernels.store(&kAvx2, std::memory_order_release);
        return;
    }
#endif
    g_level.store(IsaLevel::scalar, std::memory_order_release);
    g_kernels.store(&kScalar, std::memory_order_release);
}

std::string level_name(IsaLevel level) {
    return level == IsaLevel::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, size_t n) { return kernels().dot(a, b, n); }

double nrm2sq(const double* a, size_t n) { return kernels().dot(a, a, n); }

void axpy(double alpha, const double* x, double* y, size_t n) { kernels().axpy(alpha, x, y, n); }

void scal(double alpha, double* x, size_t n) { kernels().scal(alpha, x, n); }

void butterfly(double* a, double* b, size_t n) { kernels().butterfly(a, b, n); }

void rot(double* x, double* y, double c, double s, size_t n) { kernels().rot(x, y, c, s, n); }

}  // namespace rpsvm::simd
