#include <cmath>

#include "drift.hpp"
#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/sampling.hpp"

namespace srs {

namespace detail {

Drift::Drift(const ModelDescriptor& m) {
  require(m.is_continuous(), "Langevin dynamics needs a continuous model");
  if ((gauss_ = std::get_if<GaussianModel>(&m.model)) != nullptr) {
    const Vector tm = gauss_->precision() * gauss_->mean();
    theta_mu_.assign(tm.data(), tm.data() + tm.size());
  } else {
    phi4_ = &std::get<Phi4Model>(m.model);
    scratch_.resize(phi4_->dim());
  }
}

void Drift::operator()(std::span<const double> x, std::span<double> out) {
  const auto& k = kernels::active();
  if (gauss_ != nullptr) {
    // -theta (x - mu) = theta mu - theta x
    const std::size_t n = gauss_->dim();
    k.gemv(gauss_->precision().data(), n, n, x.data(), out.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = theta_mu_[i] - out[i];
    return;
  }
  phi4_->adjacency().neighbour_sums(x, scratch_);
  k.phi4_drift(x.data(), scratch_.data(), phi4_->alpha(), phi4_->beta(), phi4_->gamma(), out.data(),
               phi4_->dim());
}

}  // namespace detail

void glauber_update(const IsingModel& m, std::span<double> sigma, std::size_t i, Rng& rng) {
  const double p = 1.0 / (1.0 + std::exp(-2.0 * local_field(m, sigma, i)));
  sigma[i] = detail::uniform01(rng) < p ? 1.0 : -1.0;
}

void glauber_sweep(const IsingModel& m, std::span<double> sigma, Rng& rng) {
  require(sigma.size() == m.dim(), "spin vector does not match the model");
  const std::size_t n = m.dim();
  for (std::size_t t = 0; t < n; ++t) glauber_update(m, sigma, detail::uniform_index(rng, n), rng);
}

void langevin_step(const ModelDescriptor& m, std::span<double> x, double eps, std::span<const double> z) {
  require(eps >= 0.0, "Langevin step must be non-negative");
  require(x.size() == m.dim() && z.size() == m.dim(), "state does not match the model");
  detail::Drift drift(m);
  std::vector<double> d(x.size());
  drift(x, d);
  kernels::active().langevin_update(x.data(), d.data(), z.data(), eps, x.size());
}

void langevin_step(const ModelDescriptor& m, std::span<double> x, double eps, Rng& rng) {
  std::vector<double> z(x.size());
  fill_normal(rng, z);
  langevin_step(m, x, eps, z);
}

}  // namespace srs
