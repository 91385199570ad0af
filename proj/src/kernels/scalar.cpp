#include <cmath>

#include "srs/kernels.hpp"

namespace srs::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void langevin_update(double* x, const double* drift, const double* noise, double eps,
                     std::size_t n) {
  const double scale = std::sqrt(2.0 * eps);
  for (std::size_t i = 0; i < n; ++i) x[i] += eps * drift[i] + scale * noise[i];
}

void phi4_drift(const double* x, const double* s, double alpha, double beta, double gamma,
                double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    out[i] = -4.0 * alpha * xi * xi * xi - 2.0 * beta * xi - gamma * s[i];
  }
}

void phi4_sums(const double* x, const double* s, std::size_t n, Phi4Sums* acc) {
  Phi4Sums t;
  for (std::size_t i = 0; i < n; ++i) {
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

const KernelTable kTable{Isa::scalar, dot, axpy, gemv, gemv_t, langevin_update, phi4_drift,
                         phi4_sums};

}  // namespace

const KernelTable& scalar_table() { return kTable; }

}  // namespace srs::kernels
