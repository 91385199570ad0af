// AArch64 Advanced SIMD variants (two doubles per register). NEON is part of
// the AArch64 baseline, so no extra compile flags are needed.

#include <arm_neon.h>

#include <cmath>

#include "tables.hpp"

namespace srs::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  for (; r + 2 <= rows; r += 2) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      const float64x2_t vx = vld1q_f64(x + c);
      s0 = vfmaq_f64(s0, vld1q_f64(a0 + c), vx);
      s1 = vfmaq_f64(s1, vld1q_f64(a1 + c), vx);
    }
    double t0 = vaddvq_f64(s0), t1 = vaddvq_f64(s1);
    for (; c < cols; ++c) {
      t0 += a0[c] * x[c];
      t1 += a1[c] * x[c];
    }
    y[r] = t0;
    y[r + 1] = t1;
  }
  for (; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void langevin_update(double* x, const double* drift, const double* noise, double eps,
                     std::size_t n) {
  const double scale = std::sqrt(2.0 * eps);
  const float64x2_t ve = vdupq_n_f64(eps);
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    v = vfmaq_f64(v, ve, vld1q_f64(drift + i));
    v = vfmaq_f64(v, vs, vld1q_f64(noise + i));
    vst1q_f64(x + i, v);
  }
  for (; i < n; ++i) x[i] += eps * drift[i] + scale * noise[i];
}

void phi4_drift(const double* x, const double* s, double alpha, double beta, double gamma,
                double* out, std::size_t n) {
  const float64x2_t c3 = vdupq_n_f64(-4.0 * alpha);
  const float64x2_t c1 = vdupq_n_f64(-2.0 * beta);
  const float64x2_t cg = vdupq_n_f64(-gamma);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t poly = vfmaq_f64(c1, c3, vmulq_f64(vx, vx));
    vst1q_f64(out + i, vfmaq_f64(vmulq_f64(cg, vld1q_f64(s + i)), vx, poly));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    out[i] = -4.0 * alpha * xi * xi * xi - 2.0 * beta * xi - gamma * s[i];
  }
}

void phi4_sums(const double* x, const double* s, std::size_t n, Phi4Sums* acc) {
  float64x2_t a2 = vdupq_n_f64(0.0), a4 = vdupq_n_f64(0.0), a6 = vdupq_n_f64(0.0);
  float64x2_t a3s = vdupq_n_f64(0.0), axs = vdupq_n_f64(0.0), as2 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    const float64x2_t vs = vld1q_f64(s + i);
    const float64x2_t x2 = vmulq_f64(vx, vx);
    const float64x2_t x4 = vmulq_f64(x2, x2);
    a2 = vaddq_f64(a2, x2);
    a4 = vaddq_f64(a4, x4);
    a6 = vfmaq_f64(a6, x4, x2);
    a3s = vfmaq_f64(a3s, vmulq_f64(x2, vx), vs);
    axs = vfmaq_f64(axs, vx, vs);
    as2 = vfmaq_f64(as2, vs, vs);
  }
  Phi4Sums t{vaddvq_f64(a2), vaddvq_f64(a4), vaddvq_f64(a6),
             vaddvq_f64(a3s), vaddvq_f64(axs), vaddvq_f64(as2)};
  for (; i < n; ++i) {
    const double xi = x[i];
    const double x2 = xi * xi;
    t.x2 += x2;
    t.x4 += x2 * x2;
    t.x6 += x2 * x2 * x2;
    t.x3s += x2 * xi * s[i];
    t.xs += xi * s[i];
    t.s2 += s[i] * s[i];
  }
  acc->x2 += t.x2;
  acc->x4 += t.x4;
  acc->x6 += t.x6;
  acc->x3s += t.x3s;
  acc->xs += t.xs;
  acc->s2 += t.s2;
}

const KernelTable kTable{Isa::neon, dot, axpy, gemv, gemv_t, langevin_update, phi4_drift,
                         phi4_sums};

}  // namespace

const KernelTable& neon_table() { return kTable; }

}  // namespace srs::kernels::detail
