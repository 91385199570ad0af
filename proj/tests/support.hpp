#pragma once

// Small helpers shared by the unit suites.

#include <cmath>
#include <random>
#include <vector>

#include "srs/model.hpp"
#include "srs/sample_set.hpp"

namespace test {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline srs::SampleSet random_continuous(std::size_t m, std::size_t n, std::uint64_t seed,
                                        std::vector<std::size_t> shape = {}) {
  return srs::SampleSet(srs::SampleKind::continuous, n, random_vector(m * n, seed), std::move(shape));
}

inline srs::SampleSet random_spins(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(m * n);
  for (double& x : v) x = (rng() & 1) ? 1.0 : -1.0;
  return srs::SampleSet(srs::SampleKind::spin, n, std::move(v));
}

/// Random symmetric couplings with zero diagonal and fields, entries in [-scale, scale].
inline srs::IsingModel random_ising(std::size_t n, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  srs::Matrix j = srs::Matrix::Zero(n, n);
  srs::Vector h(n);
  for (std::size_t a = 0; a < n; ++a) {
    h(a) = u(rng);
    for (std::size_t b = a + 1; b < n; ++b) j(a, b) = j(b, a) = u(rng);
  }
  return srs::IsingModel(j, h);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace test
