// NEON variants for aarch64. float64x2_t gives two lanes per op; the loops
// mirror the AVX2 file with the narrower width.

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include <algorithm>
#include <cstddef>

namespace twisty::kernels::neon {

void rowmax3(const double* a, const double* b, const double* c, double* out,
             std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va = vld1q_f64(a + i);
    float64x2_t vb = vld1q_f64(b + i);
    float64x2_t vc = vld1q_f64(c + i);
    vst1q_f64(out + i, vmaxq_f64(va, vmaxq_f64(vb, vc)));
  }
  for (; i < n; ++i) out[i] = std::max(a[i], std::max(b[i], c[i]));
}

void rowmax2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmaxq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = std::max(a[i], b[i]);
}

void sqdist_rows(const double* m, std::size_t rows, std::size_t dim,
                 const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * dim;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= dim; k += 2) {
      float64x2_t diff = vsubq_f64(vld1q_f64(row + k), vld1q_f64(x + k));
      acc = vfmaq_f64(acc, diff, diff);
    }
    double tail = vaddvq_f64(acc);
    for (; k < dim; ++k) {
      const double diff = row[k] - x[k];
      tail += diff * diff;
    }
    out[r] = tail;
  }
}

void clamp_radius(const double* d, double alpha, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmaxq_f64(vsubq_f64(va, vld1q_f64(d + i)), zero));
  for (; i < n; ++i) out[i] = std::max(alpha - d[i], 0.0);
}

void min_update(double* m, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(m + i, vminq_f64(vld1q_f64(m + i), vld1q_f64(v + i)));
  for (; i < n; ++i) m[i] = std::min(m[i], v[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double tail = vaddvq_f64(acc);
  for (; i < n; ++i) tail += a[i] * b[i];
  return tail;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double tail = vaddvq_f64(acc);
  for (; i < n; ++i) tail += a[i];
  return tail;
}

}  // namespace twisty::kernels::neon

#endif
