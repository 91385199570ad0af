#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/learning.hpp"
#include "srs/parallel.hpp"

namespace srs {

namespace {

void check_spin(const SampleSet& s) {
  if (s.kind() != SampleKind::spin) fail(ErrorKind::invalid_argument, "GRISE needs spin samples");
}

// Distinct configurations with their total weight. Repeated rows are common
// for small N, and every GRISE pass is linear in the number of rows.
struct WeightedStates {
  std::vector<double> rows;  // K x N
  std::vector<double> weights;
  std::size_t k = 0;
};

WeightedStates aggregate(const SampleSet& s, std::span<const double> weights) {
  const std::size_t n = s.dim();
  WeightedStates out;
  if (n > 64) {
    out.rows.assign(s.values().begin(), s.values().end());
    out.weights.assign(weights.begin(), weights.end());
    out.k = s.size();
    return out;
  }
  std::map<std::uint64_t, std::pair<std::size_t, double>> seen;  // index -> (first row, weight)
  for (std::size_t m = 0; m < s.size(); ++m) {
    std::uint64_t idx = 0;
    const auto row = s.row(m);
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i] > 0) idx |= std::uint64_t{1} << i;
    }
    auto [it, inserted] = seen.try_emplace(idx, m, 0.0);
    it->second.second += weights[m];
  }
  out.k = seen.size();
  out.rows.reserve(out.k * n);
  out.weights.reserve(out.k);
  for (const auto& [idx, entry] : seen) {
    const auto row = s.row(entry.first);
    out.rows.insert(out.rows.end(), row.begin(), row.end());
    out.weights.push_back(entry.second);
  }
  return out;
}

struct NodeFit {
  std::vector<double> theta;  // couplings, with the field stored at position i
  GriseNodeReport report;
};

// Plain gradient descent on the ISO of node i from zero, with a proximal
// soft-threshold step for the optional l1 penalty. A step that increases the
// objective is rejected and the step size halved.
NodeFit fit_node(const WeightedStates& data, std::size_t n, std::size_t i, double total_weight,
                 const GriseOptions& opts) {
  const auto& k = kernels::active();
  const std::size_t rows = data.k;

  // Row m: F_mj = s_i s_j for j != i, F_mi = s_i, so u = F theta is the
  // screened energy s_i (h_i + sum_j J_ij s_j).
  std::vector<double> f(rows * n);
  for (std::size_t m = 0; m < rows; ++m) {
    const double* s = data.rows.data() + m * n;
    double* fr = f.data() + m * n;
    for (std::size_t j = 0; j < n; ++j) fr[j] = s[i] * s[j];
    fr[i] = s[i];
  }

  std::vector<double> theta(n, 0.0), cand(n), grad(n), u(rows, 0.0), e(rows);
  const auto objective = [&](const std::vector<double>& th, const std::vector<double>& uu) {
    double loss = 0.0;
    for (std::size_t m = 0; m < rows; ++m) loss += data.weights[m] * std::exp(-uu[m]);
    loss /= total_weight;
    if (opts.l1_lambda > 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) loss += opts.l1_lambda * std::abs(th[j]);
      }
    }
    return loss;
  };

  NodeFit out;
  double obj = objective(theta, u);
  double eta = opts.step_size;
  std::vector<double> u_cand(rows);
  std::size_t it = 0;
  bool converged = false;
  while (it < opts.max_iterations) {
    ++it;
    for (std::size_t m = 0; m < rows; ++m) e[m] = -data.weights[m] * std::exp(-u[m]) / total_weight;
    std::fill(grad.begin(), grad.end(), 0.0);
    k.gemv_t(f.data(), rows, n, e.data(), grad.data());

    for (std::size_t j = 0; j < n; ++j) cand[j] = theta[j] - eta * grad[j];
    if (opts.l1_lambda > 0.0) {
      const double t = eta * opts.l1_lambda;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand[j] = std::copysign(std::max(std::abs(cand[j]) - t, 0.0), cand[j]);
      }
    }
    k.gemv(f.data(), rows, n, cand.data(), u_cand.data());
    const double next = objective(cand, u_cand);
    if (!(next <= obj)) {
      eta *= 0.5;
      if (eta < 1e-12 * opts.step_size) {
        converged = true;
        break;
      }
      continue;
    }
    const double improvement = obj - next;
    theta.swap(cand);
    u.swap(u_cand);
    obj = next;
    if (improvement < opts.improvement_tolerance) {
      converged = true;
      break;
    }
  }
  out.theta = std::move(theta);
  out.report = {it, obj, converged};
  return out;
}

}  // namespace

double iso_loss(const SampleSet& samples, std::size_t i, std::span<const double> j_row, double h_i) {
  check_spin(samples);
  const std::size_t n = samples.dim();
  require(i < n, "site index out of range");
  require(j_row.size() == n || j_row.size() + 1 == n, "coupling row needs N or N-1 entries");
  std::vector<double> row(n, 0.0);
  for (std::size_t j = 0, src = 0; j < n; ++j) {
    if (j_row.size() == n) {
      row[j] = j == i ? 0.0 : j_row[j];
    } else if (j != i) {
      row[j] = j_row[src++];
    }
  }
  const auto& k = kernels::active();
  double sum = 0.0;
  for (std::size_t m = 0; m < samples.size(); ++m) {
    const auto s = samples.row(m);
    sum += std::exp(-s[i] * (h_i + k.dot(row.data(), s.data(), n)));
  }
  return sum / static_cast<double>(samples.size());
}

GriseResult grise_fit(const SampleSet& samples, const GriseOptions& opts) {
  require(samples.size() >= 2, "GRISE needs at least two samples");
  const std::vector<double> ones(samples.size(), 1.0);
  return grise_fit(samples, ones, opts);
}

GriseResult grise_fit(const SampleSet& states, std::span<const double> weights,
                      const GriseOptions& opts) {
  check_spin(states);
  require(opts.step_size > 0.0, "GRISE step size must be positive");
  require(opts.improvement_tolerance > 0.0, "GRISE improvement tolerance must be positive");
  require(opts.l1_lambda >= 0.0 && opts.coupling_threshold >= 0.0,
          "l1 weight and coupling threshold must be non-negative");
  require(weights.size() == states.size(), "one weight per configuration is required");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), "weights must be finite and non-negative");
    total += w;
  }
  require(total > 0.0, "weights must have a positive sum");

  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = states.dim();
  const WeightedStates data = aggregate(states, weights);

  std::vector<NodeFit> fits(n);
  parallel_for(n, [&](std::size_t i) { fits[i] = fit_node(data, n, i, total, opts); });

  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Vector h(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    h(static_cast<Eigen::Index>(a)) = fits[a].theta[a];
    for (std::size_t b = a + 1; b < n; ++b) {
      double v = 0.5 * (fits[a].theta[b] + fits[b].theta[a]);
      if (std::abs(v) < opts.coupling_threshold) v = 0.0;
      j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      j(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  }

  GriseResult out{IsingModel(std::move(j), std::move(h)), {}, true, 0.0};
  for (auto& f : fits) {
    out.converged = out.converged && f.report.converged;
    out.nodes.push_back(f.report);
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace srs
