// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it is reached through the dispatcher after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "tables.hpp"

namespace srs::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Four rows per pass so each load of x feeds four FMAs.
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    const double* a2 = a1 + cols;
    const double* a3 = a2 + cols;
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d vx = _mm256_loadu_pd(x + c);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + c), vx, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + c), vx, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + c), vx, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + c), vx, s3);
    }
    double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; c < cols; ++c) {
      t0 += a0[c] * x[c];
      t1 += a1[c] * x[c];
      t2 += a2[c] * x[c];
      t3 += a3[c] * x[c];
    }
    y[r] = t0;
    y[r + 1] = t1;
    y[r + 2] = t2;
    y[r + 3] = t3;
  }
  for (; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    const double* a2 = a1 + cols;
    const double* a3 = a2 + cols;
    const __m256d v0 = _mm256_set1_pd(x[r]), v1 = _mm256_set1_pd(x[r + 1]);
    const __m256d v2 = _mm256_set1_pd(x[r + 2]), v3 = _mm256_set1_pd(x[r + 3]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d acc = _mm256_loadu_pd(y + c);
      acc = _mm256_fmadd_pd(v0, _mm256_loadu_pd(a0 + c), acc);
      acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(a1 + c), acc);
      acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(a2 + c), acc);
      acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(a3 + c), acc);
      _mm256_storeu_pd(y + c, acc);
    }
    for (; c < cols; ++c) {
      y[c] += x[r] * a0[c] + x[r + 1] * a1[c] + x[r + 2] * a2[c] + x[r + 3] * a3[c];
    }
  }
  for (; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void langevin_update(double* x, const double* drift, const double* noise, double eps,
                     std::size_t n) {
  const double scale = std::sqrt(2.0 * eps);
  const __m256d ve = _mm256_set1_pd(eps);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_fmadd_pd(ve, _mm256_loadu_pd(drift + i), v);
    v = _mm256_fmadd_pd(vs, _mm256_loadu_pd(noise + i), v);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) x[i] += eps * drift[i] + scale * noise[i];
}

void phi4_drift(const double* x, const double* s, double alpha, double beta, double gamma,
                double* out, std::size_t n) {
  const __m256d c3 = _mm256_set1_pd(-4.0 * alpha);
  const __m256d c1 = _mm256_set1_pd(-2.0 * beta);
  const __m256d cg = _mm256_set1_pd(-gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d x2 = _mm256_mul_pd(vx, vx);
    // x * (c3 x^2 + c1) + cg s
    const __m256d poly = _mm256_fmadd_pd(c3, x2, c1);
    const __m256d r = _mm256_fmadd_pd(vx, poly, _mm256_mul_pd(cg, _mm256_loadu_pd(s + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    out[i] = -4.0 * alpha * xi * xi * xi - 2.0 * beta * xi - gamma * s[i];
  }
}

void phi4_sums(const double* x, const double* s, std::size_t n, Phi4Sums* acc) {
  __m256d a2 = _mm256_setzero_pd(), a4 = _mm256_setzero_pd(), a6 = _mm256_setzero_pd();
  __m256d a3s = _mm256_setzero_pd(), axs = _mm256_setzero_pd(), as2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vs = _mm256_loadu_pd(s + i);
    const __m256d x2 = _mm256_mul_pd(vx, vx);
    const __m256d x4 = _mm256_mul_pd(x2, x2);
    a2 = _mm256_add_pd(a2, x2);
    a4 = _mm256_add_pd(a4, x4);
    a6 = _mm256_fmadd_pd(x4, x2, a6);
    a3s = _mm256_fmadd_pd(_mm256_mul_pd(x2, vx), vs, a3s);
    axs = _mm256_fmadd_pd(vx, vs, axs);
    as2 = _mm256_fmadd_pd(vs, vs, as2);
  }
  Phi4Sums t{hsum(a2), hsum(a4), hsum(a6), hsum(a3s), hsum(axs), hsum(as2)};
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

const KernelTable kTable{Isa::avx2, dot, axpy, gemv, gemv_t, langevin_update, phi4_drift,
                         phi4_sums};

}  // namespace

const KernelTable& avx2_table() { return kTable; }

}  // namespace srs::kernels::detail
