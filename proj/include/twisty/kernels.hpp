#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the distance, persistence and coordinate
// code paths. Every kernel has a scalar reference implementation plus SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected once at startup from
// the CPU feature flags. The env var TWISTY_KERNELS=scalar|avx2|neon forces
// a backend; requesting an unsupported one falls back to scalar.

namespace twisty::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
std::string_view backend_name();

// out[i] = max(a[i], b[i], c[i])
void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n);

// out[i] = max(a[i], b[i])
void rowmax2(const double* a, const double* b, double* out, std::size_t n);

// Squared Euclidean distance from x to each row of the row-major
// rows x dim matrix m.
void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out);

// out[i] = max(alpha - d[i], 0) -- the |alpha - d|_+ truncation.
void clamp_radius(const double* d, double alpha, double* out, std::size_t n);

// m[i] = min(m[i], v[i])
void min_update(double* m, const double* v, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

double sum(const double* a, std::size_t n);

// Index of the maximum element; lowest index wins ties. n must be >= 1.
std::size_t argmax(const double* a, std::size_t n);

namespace detail {
// Scalar reference implementations, exposed so equivalence tests can compare
// the dispatched kernels against them directly.
void rowmax3_scalar(const double* a, const double* b, const double* c,
                    double* out, std::size_t n);
void rowmax2_scalar(const double* a, const double* b, double* out,
                    std::size_t n);
void sqdist_rows_scalar(const double* m, std::size_t rows, std::size_t dim,
                        const double* x, double* out);
void clamp_radius_scalar(const double* d, double alpha, double* out,
                         std::size_t n);
void min_update_scalar(double* m, const double* v, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
}  // namespace detail

}  // namespace twisty::kernels
