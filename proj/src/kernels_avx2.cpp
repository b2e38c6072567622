// AVX2 variants of the hot loops. Compiled with -mavx2 -mfma in its own
// translation unit; only reached after the runtime cpuid check in kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

namespace twisty::kernels::avx2 {

void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    __m256d vc = _mm256_loadu_pd(c + i);
    _mm256_storeu_pd(out + i, _mm256_max_pd(va, _mm256_max_pd(vb, vc)));
  }
  for (; i < n; ++i) out[i] = std::max(a[i], std::max(b[i], c[i]));
}

void rowmax2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, _mm256_max_pd(va, vb));
  }
  for (; i < n; ++i) out[i] = std::max(a[i], b[i]);
}

void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= dim; k += 4) {
      __m256d diff =
          _mm256_sub_pd(_mm256_loadu_pd(row + k), _mm256_loadu_pd(x + k));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double tail = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; k < dim; ++k) {
      const double diff = row[k] - x[k];
      tail += diff * diff;
    }
    out[r] = tail;
  }
}

void clamp_radius(const double* d, double alpha, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(va, _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(out + i, _mm256_max_pd(v, zero));
  }
  for (; i < n; ++i) out[i] = std::max(alpha - d[i], 0.0);
}

void min_update(double* m, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    _mm256_storeu_pd(m + i, _mm256_min_pd(vm, vv));
  }
  for (; i < n; ++i) m[i] = std::min(m[i], v[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double tail = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) tail += a[i] * b[i];
  return tail;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double tail = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) tail += a[i];
  return tail;
}

}  // namespace twisty::kernels::avx2

#endif
