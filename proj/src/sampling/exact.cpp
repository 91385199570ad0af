#include <algorithm>
#include <bit>
#include <cmath>

#include "drift.hpp"
#include "srs/error.hpp"
#include "srs/parallel.hpp"
#include "srs/sampling.hpp"

namespace srs {

std::vector<double> spin_state(std::uint64_t index, std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (index >> i) & 1 ? 1.0 : -1.0;
  return s;
}

std::vector<double> exact_ising_distribution(const IsingModel& m) {
  const std::size_t n = m.dim();
  if (n > 24) fail(ErrorKind::invalid_argument, "exact enumeration is limited to N <= 24 spins");
  const std::size_t states = std::size_t{1} << n;

  // Walk the states in Gray-code order so each step flips one spin and the
  // energy changes by -2 s_i f_i.
  std::vector<double> energy(states);
  std::vector<double> sigma = spin_state(0, n);
  double e = ising_energy(m, sigma);
  std::uint64_t index = 0;
  energy[0] = e;
  for (std::size_t g = 1; g < states; ++g) {
    const auto i = static_cast<std::size_t>(std::countr_zero(g));
    e -= 2.0 * sigma[i] * local_field(m, sigma, i);
    sigma[i] = -sigma[i];
    index ^= std::uint64_t{1} << i;
    energy[index] = e;
  }

  const double top = *std::max_element(energy.begin(), energy.end());
  double z = 0.0;
  for (double& v : energy) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : energy) v /= z;
  return energy;
}

SampleSet sample_exact(std::span<const double> table, std::size_t n, std::size_t m, std::uint64_t seed) {
  require(n <= 24 && table.size() == (std::size_t{1} << n), "table must hold 2^N probabilities");
  require(m >= 1, "need at least one sample");
  std::vector<double> cdf(table.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < table.size(); ++s) {
    require(table[s] >= 0.0 && std::isfinite(table[s]), "probabilities must be finite and non-negative");
    acc += table[s];
    cdf[s] = acc;
  }
  require(acc > 0.0, "distribution table has zero mass");

  SampleSet out(SampleKind::spin, m, n);
  const std::size_t blocks = std::min(kChainBlocks, m);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const double u = detail::uniform01(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      // Only reachable through rounding of u; fall back to the last state with mass.
      if (it == cdf.end()) it = std::lower_bound(cdf.begin(), cdf.end(), acc);
      const auto index = static_cast<std::uint64_t>(it - cdf.begin());
      auto row = out.row(i);
      for (std::size_t k = 0; k < n; ++k) row[k] = (index >> k) & 1 ? 1.0 : -1.0;
    }
  });
  return out;
}

std::vector<double> apply_glauber_transition(const IsingModel& m, std::span<const double> table) {
  const std::size_t n = m.dim();
  require(n <= 24 && table.size() == (std::size_t{1} << n), "table must hold 2^N probabilities");
  std::vector<double> out(table.size(), 0.0);
  for (std::size_t s = 0; s < table.size(); ++s) {
    const std::vector<double> sigma = spin_state(s, n);
    for (std::size_t i = 0; i < n; ++i) {
      // Site i is picked with probability 1/N and set to sigma_i regardless
      // of its previous value.
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * local_field(m, sigma, i)));
      const double p = sigma[i] > 0 ? p_plus : 1.0 - p_plus;
      out[s] += p * (table[s] + table[s ^ (std::size_t{1} << i)]) / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace srs
