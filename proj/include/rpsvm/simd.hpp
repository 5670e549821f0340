#pragma once

#include <cstddef>
#include <string>

namespace rpsvm::simd {

// Arithmetic inner loops come in a scalar reference version and an AVX2
// version. The active level is resolved once at startup from CPU detection,
// overridable with RPSVM_SIMD=scalar|avx2 (tests use force_level to compare
// the two paths on the same machine).

enum class IsaLevel { scalar, avx2 };

IsaLevel active_level();
void force_level(IsaLevel level);
std::string level_name(IsaLevel level);

double dot(const double* a, const double* b, size_t n);
double nrm2sq(const double* a, size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, size_t n);

// x *= alpha
void scal(double alpha, double* x, size_t n);

// Hadamard butterfly on two half-blocks: (a, b) <- (a + b, a - b) elementwise.
void butterfly(double* a, double* b, size_t n);

// Plane rotation: (x, y) <- (c*x + s*y, -s*x + c*y) elementwise.
void rot(double* x, double* y, double c, double s, size_t n);

}  // namespace rpsvm::simd
