#include <boost/random/normal_distribution.hpp>

#include "srs/sampling.hpp"

namespace srs {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// Boost's normal distribution is a ziggurat and keeps no cached state, so a
// fresh instance per call costs nothing and replays exactly.
double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>()(rng); }

void fill_normal(Rng& rng, std::span<double> out) {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = dist(rng);
}

}  // namespace srs
