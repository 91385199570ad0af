#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "drift.hpp"
#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/parallel.hpp"
#include "srs/sampling.hpp"

namespace srs {

IsingModel random_lattice_ising(std::span<const std::size_t> shape, Boundary boundary,
                                double coupling_max, Rng& rng) {
  require(coupling_max >= 0.0, "coupling range must be non-negative");
  const std::size_t n = shape_product(shape);
  require(n >= 1, "lattice needs at least one site");
  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : lattice_edges(shape, boundary)) {
    const double v = coupling_max * (2.0 * detail::uniform01(rng) - 1.0);
    j(e.a, e.b) = v;
    j(e.b, e.a) = v;
  }
  return IsingModel(std::move(j), Vector::Zero(static_cast<Eigen::Index>(n)));
}

SampleSet generate_gaussian(const Vector& mu, const Matrix& sigma, std::size_t m, std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(mu.size());
  require(n >= 1 && sigma.rows() == mu.size() && sigma.cols() == mu.size(), "covariance must be N x N");
  require(sigma == sigma.transpose(), "covariance must be symmetric");
  require(m >= 1, "need at least one sample");
  Eigen::LLT<Matrix> llt(sigma);
  require(llt.info() == Eigen::Success, "covariance must be positive definite");
  const Matrix l = llt.matrixL();

  SampleSet out(SampleKind::continuous, m, n);
  const std::size_t blocks = std::min(kChainBlocks, m);
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    std::vector<double> z(n);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      fill_normal(rng, z);
      auto row = out.row(i);
      k.gemv(l.data(), n, n, z.data(), row.data());
      for (std::size_t t = 0; t < n; ++t) row[t] += mu(static_cast<Eigen::Index>(t));
    }
  });
  return out;
}

namespace {

double condition_number(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : INFINITY;
}

}  // namespace

Matrix random_covariance(std::size_t n, double max_cond, Rng& rng) {
  require(n >= 1 && max_cond >= 1.0, "need N >= 1 and a condition bound >= 1");
  Matrix c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = detail::uniform01(rng) - 0.5;
    Matrix s = c * c.transpose();
    s = (0.5 * (s + s.transpose())).eval();
    if (condition_number(s) <= max_cond) return s;
  }
  fail(ErrorKind::numerical, "could not draw a covariance within the condition bound");
}

Matrix well_conditioned_covariance(std::size_t n, double kappa, Rng& rng) {
  require(n >= 1 && kappa >= 1.0, "need N >= 1 and kappa >= 1");
  Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = standard_normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Sign-fix against R's diagonal so Q is Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  Vector d(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d(i) = kappa == 1.0 ? 1.0 : 1.0 / kappa + (1.0 - 1.0 / kappa) * detail::uniform01(rng);
  }
  Matrix s = q * d.asDiagonal() * q.transpose();
  return (0.5 * (s + s.transpose())).eval();
}

SampleSet generate_phi4(const Phi4Model& m, std::size_t n_steps, double dt, std::size_t count,
                        std::uint64_t seed, std::vector<std::size_t> shape) {
  require(dt > 0.0, "Langevin step must be positive");
  require(count >= 1, "need at least one chain");
  const std::size_t n = m.dim();
  const ModelDescriptor md(m);
  SampleSet out(SampleKind::continuous, count, n, std::move(shape));
  const std::size_t blocks = std::min(kChainBlocks, count);
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    detail::Drift drift(md);
    std::vector<double> d(n), z(n);
    const auto r = block_range(count, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      auto x = out.row(i);
      fill_normal(rng, x);
      for (std::size_t t = 0; t < n_steps; ++t) {
        drift(x, d);
        fill_normal(rng, z);
        k.langevin_update(x.data(), d.data(), z.data(), dt, n);
      }
      for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > 1e6) {
          fail(ErrorKind::numerical, "Phi4 Langevin chain diverged; reduce dt");
        }
      }
    }
  });
  return out;
}

SampleSet concat_datasets(std::span<const SampleSet> sets, std::size_t m, std::uint64_t seed) {
  require(!sets.empty(), "need at least one dataset");
  require(m >= 1, "need at least one sample");
  std::size_t n = 0;
  for (const auto& s : sets) {
    require(s.kind() == sets[0].kind(), "datasets must share a sample kind");
    n += s.dim();
  }
  SampleSet out(sets[0].kind(), m, n);
  const std::size_t blocks = std::min(kChainBlocks, m);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      auto dst = out.row(i).begin();
      for (const auto& s : sets) {
        const auto src = s.row(detail::uniform_index(rng, s.size()));
        dst = std::copy(src.begin(), src.end(), dst);
      }
    }
  });
  return out;
}

double thermal_velocity(const TemperatureSpec& spec, double kelvin) {
  require(!spec.masses.empty() && spec.masses[0] > 0.0, "need a positive mass");
  return std::sqrt(spec.boltzmann * kelvin / spec.masses[0]);
}

SampleSet maxwell_boltzmann(std::size_t m, std::size_t atoms_per_row, double kelvin,
                            const TemperatureSpec& spec, std::uint64_t seed, bool thermostat) {
  require(kelvin > 0.0, "temperature must be positive");
  require(m >= 1 && atoms_per_row >= 1, "need at least one atom");
  require(spec.n_dim >= 1 && spec.velocity_unit > 0.0, "invalid temperature constants");
  require(spec.masses.size() == 1 || spec.masses.size() == atoms_per_row,
          "need one mass, or one per atom in a row");
  const auto nd = static_cast<std::size_t>(spec.n_dim);
  const std::size_t n = atoms_per_row * nd;
  const auto mass = [&](std::size_t a) { return spec.masses.size() == 1 ? spec.masses[0] : spec.masses[a]; };

  SampleSet out(SampleKind::continuous, m, n);
  const std::size_t blocks = std::min(kChainBlocks, m);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      auto row = out.row(i);
      for (std::size_t a = 0; a < atoms_per_row; ++a) {
        const double sd = std::sqrt(spec.boltzmann * kelvin / mass(a)) / spec.velocity_unit;
        for (std::size_t d = 0; d < nd; ++d) row[a * nd + d] = sd * standard_normal(rng);
      }
    }
  });
  if (!thermostat) return out;

  // Remove the centre-of-mass velocity of the whole group, then rescale so
  // the group temperature is exactly `kelvin`.
  std::vector<double> momentum(nd, 0.0);
  double total_mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < atoms_per_row; ++a) {
      total_mass += mass(a);
      for (std::size_t d = 0; d < nd; ++d) momentum[d] += mass(a) * out(i, a * nd + d);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < atoms_per_row; ++a) {
      for (std::size_t d = 0; d < nd; ++d) out(i, a * nd + d) -= momentum[d] / total_mass;
    }
  }
  const double t = temperature(out, spec).group;
  require(t > 0.0, "degenerate velocity draw");
  const double scale = std::sqrt(kelvin / t);
  for (double& v : out.values()) v *= scale;
  return out;
}

}  // namespace srs
