#pragma once
// Dense double-precision inner-loop kernels.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant compiled in a separate translation unit. The active table is picked
// once at first use from CPUID; RIDGE_SIMD=scalar in the environment forces
// the reference path.

#include <cstddef>
#include <string_view>

namespace ridge::simd {

struct KernelTable {
    std::string_view name;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // (a, b) <- (c*a - s*b, s*a + c*b)
    void (*rotate)(double* a, double* b, double c, double s, std::size_t n);
    // y[i] = alpha * x[i]
    void (*scale_copy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// Returns nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

bool cpu_has_avx2_fma();

// Table used by the library; fixed for the lifetime of the process.
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void rotate(double* a, double* b, double c, double s, std::size_t n) { active().rotate(a, b, c, s, n); }
inline void scale_copy(double alpha, const double* x, double* y, std::size_t n) {
    active().scale_copy(alpha, x, y, n);
}

}  // namespace ridge::simd
