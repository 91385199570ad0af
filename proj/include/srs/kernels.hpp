#pragma once

// Data-parallel inner loops shared by the learning, codec, QoI and sampling
// code. Every kernel has a portable scalar reference implementation; vector
// variants (AVX2+FMA on x86-64, NEON on AArch64) are selected once at runtime
// and must agree with the reference up to floating-point reassociation.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace srs::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Sums used by Phi^4 statistics and score matching, accumulated over sites:
/// x^2, x^4, x^6, x^3*s, x*s, s^2 where s is the neighbour sum of the site.
struct Phi4Sums {
  double x2 = 0, x4 = 0, x6 = 0, x3s = 0, xs = 0, s2 = 0;
};

struct KernelTable {
  Isa isa;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  /// y = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

  /// y += A^T x, A row-major rows x cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

  /// x += eps * drift + sqrt(2 eps) * noise
  void (*langevin_update)(double* x, const double* drift, const double* noise, double eps,
                          std::size_t n);

  /// out = -4 alpha x^3 - 2 beta x - gamma s
  void (*phi4_drift)(const double* x, const double* s, double alpha, double beta, double gamma,
                     double* out, std::size_t n);

  /// Adds the per-site power sums of (x, s) into acc.
  void (*phi4_sums)(const double* x, const double* s, std::size_t n, Phi4Sums* acc);
};

/// Reference implementation, always available.
const KernelTable& scalar_table();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

/// Currently active table. Defaults to the widest supported ISA; the
/// SRS_ISA environment variable (scalar|avx2|neon) overrides the default.
const KernelTable& active();

/// Selects an ISA; returns false if it is not supported here.
bool select(Isa isa);

// Convenience wrappers over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace srs::kernels
