#include "twisty/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

namespace twisty::kernels {

namespace detail {

void rowmax3_scalar(const double* a, const double* b, const double* c,
                    double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::max(a[i], std::max(b[i], c[i]));
}

void rowmax2_scalar(const double* a, const double* b, double* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(a[i], b[i]);
}

void sqdist_rows_scalar(const double* m, std::size_t rows, std::size_t dim,
                        const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = row[k] - x[k];
      acc += diff * diff;
    }
    out[r] = acc;
  }
}

void clamp_radius_scalar(const double* d, double alpha, double* out,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(alpha - d[i], 0.0);
}

void min_update_scalar(double* m, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) m[i] = std::min(m[i], v[i]);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

}  // namespace detail

#if defined(__x86_64__) || defined(_M_X64)
#define TWISTY_HAVE_AVX2_BUILD 1
namespace avx2 {
void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n);
void rowmax2(const double* a, const double* b, double* out, std::size_t n);
void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out);
void clamp_radius(const double* d, double alpha, double* out, std::size_t n);
void min_update(double* m, const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define TWISTY_HAVE_NEON_BUILD 1
namespace neon {
void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n);
void rowmax2(const double* a, const double* b, double* out, std::size_t n);
void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out);
void clamp_radius(const double* d, double alpha, double* out, std::size_t n);
void min_update(double* m, const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace neon
#endif

namespace {

Backend detect_backend() {
  const char* force = std::getenv("TWISTY_KERNELS");
  if (force != nullptr) {
    if (std::strcmp(force, "scalar") == 0) return Backend::Scalar;
#ifdef TWISTY_HAVE_AVX2_BUILD
    if (std::strcmp(force, "avx2") == 0 && __builtin_cpu_supports("avx2"))
      return Backend::Avx2;
#endif
#ifdef TWISTY_HAVE_NEON_BUILD
    if (std::strcmp(force, "neon") == 0) return Backend::Neon;
#endif
    return Backend::Scalar;
  }
#ifdef TWISTY_HAVE_AVX2_BUILD
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
#ifdef TWISTY_HAVE_NEON_BUILD
  return Backend::Neon;
#else
  return Backend::Scalar;
#endif
}

}  // namespace

Backend active_backend() {
  static const Backend backend = detect_backend();
  return backend;
}

std::string_view backend_name() {
  switch (active_backend()) {
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    default: return "scalar";
  }
}

#ifdef TWISTY_HAVE_AVX2_BUILD
#define TWISTY_DISPATCH(fn, ...)                                      \
  switch (active_backend()) {                                         \
    case Backend::Avx2: return avx2::fn(__VA_ARGS__);                 \
    default: return detail::fn##_scalar(__VA_ARGS__);                 \
  }
#elif defined(TWISTY_HAVE_NEON_BUILD)
#define TWISTY_DISPATCH(fn, ...)                                      \
  switch (active_backend()) {                                         \
    case Backend::Neon: return neon::fn(__VA_ARGS__);                 \
    default: return detail::fn##_scalar(__VA_ARGS__);                 \
  }
#else
#define TWISTY_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__);
#endif

void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n) {
  TWISTY_DISPATCH(rowmax3, a, b, c, out, n)
}

void rowmax2(const double* a, const double* b, double* out, std::size_t n) {
  TWISTY_DISPATCH(rowmax2, a, b, out, n)
}

void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out) {
  TWISTY_DISPATCH(sqdist_rows, m, rows, dim, x, out)
}

void clamp_radius(const double* d, double alpha, double* out, std::size_t n) {
  TWISTY_DISPATCH(clamp_radius, d, alpha, out, n)
}

void min_update(double* m, const double* v, std::size_t n) {
  TWISTY_DISPATCH(min_update, m, v, n)
}

double dot(const double* a, const double* b, std::size_t n) {
  TWISTY_DISPATCH(dot, a, b, n)
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  TWISTY_DISPATCH(axpy, a, x, y, n)
}

double sum(const double* a, std::size_t n) { TWISTY_DISPATCH(sum, a, n) }

std::size_t argmax(const double* a, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (a[i] > a[best]) best = i;
  return best;
}

}  // namespace twisty::kernels
