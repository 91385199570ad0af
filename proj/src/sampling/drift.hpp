#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srs/model.hpp"
#include "srs/sampling.hpp"

namespace srs::detail {

// Score evaluation with reusable scratch space, one instance per worker.
class Drift {
 public:
  explicit Drift(const ModelDescriptor& m);

  void operator()(std::span<const double> x, std::span<double> out);

 private:
  const GaussianModel* gauss_ = nullptr;
  const Phi4Model* phi4_ = nullptr;
  std::vector<double> theta_mu_;
  std::vector<double> scratch_;
};

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform index in [0, n) by multiply-shift; the bias is below 2^-32 for the
// sizes used here.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace srs::detail
