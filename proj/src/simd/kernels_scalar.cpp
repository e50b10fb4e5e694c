#include "ridge/simd.hpp"

namespace ridge::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_scalar(double* a, double* b, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a[i];
        const double bi = b[i];
        a[i] = c * ai - s * bi;
        b[i] = s * ai + c * bi;
    }
}

void scale_copy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", dot_scalar, axpy_scalar, rotate_scalar, scale_copy_scalar};
    return table;
}

}  // namespace ridge::simd
