#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "drift.hpp"
#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/parallel.hpp"
#include "srs/sampling.hpp"
#include "srs/serialize.hpp"

namespace srs {

std::string CorrectionReport::to_json() const {
  Json j;
  j["sweeps_used"] = sweeps_used;
  j["converged"] = converged;
  j["wall_time_s"] = wall_time;
  j["max_regression"] = max_regression;
  Json trace_json = Json::array();
  for (const auto& p : trace) {
    Json row;
    row["sweep"] = p.sweep;
    row["qoi_error"] = p.error;
    row["wall_time_s"] = p.wall_time;
    trace_json.push_back(std::move(row));
  }
  j["error_trace"] = std::move(trace_json);
  return j.dump(2);
}

std::string CorrectionReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "sweep,qoi_error,wall_time_s\n";
  for (const auto& p : trace) out << p.sweep << ',' << p.error << ',' << p.wall_time << '\n';
  return out.str();
}

long long CorrectionReport::sweeps_to(double tolerance) const {
  for (const auto& p : trace) {
    if (p.error <= tolerance) return static_cast<long long>(p.sweep);
  }
  return -1;
}

namespace {

void check_init(const SampleSet& init, const ModelDescriptor& m) {
  if (init.dim() != m.dim()) {
    fail(ErrorKind::invalid_argument, "initial samples have dimension " + std::to_string(init.dim()) +
                                          ", model has " + std::to_string(m.dim()));
  }
  if (m.is_ising() != (init.kind() == SampleKind::spin)) {
    fail(ErrorKind::invalid_argument, "sample kind does not match the model variant");
  }
}

void advance_spins(SampleSet& state, const IsingModel& m, std::vector<Rng>& rngs, std::size_t sweeps) {
  const std::size_t count = state.size();
  parallel_for(rngs.size(), [&](std::size_t b) {
    const auto r = block_range(count, rngs.size(), b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      for (std::size_t s = 0; s < sweeps; ++s) glauber_sweep(m, state.row(i), rngs[b]);
    }
  });
}

void advance_continuous(SampleSet& state, const ModelDescriptor& m, std::vector<Rng>& rngs,
                        std::size_t steps, double eps) {
  const std::size_t count = state.size(), n = state.dim();
  const auto& k = kernels::active();
  parallel_for(rngs.size(), [&](std::size_t b) {
    detail::Drift drift(m);
    std::vector<double> d(n), z(n);
    const auto r = block_range(count, rngs.size(), b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      auto x = state.row(i);
      for (std::size_t s = 0; s < steps; ++s) {
        drift(x, d);
        fill_normal(rngs[b], z);
        k.langevin_update(x.data(), d.data(), z.data(), eps, n);
      }
      for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(x[t]) || std::abs(x[t]) > 1e6) {
          fail(ErrorKind::numerical, "Langevin chain " + std::to_string(i) + " diverged at coordinate " +
                                         std::to_string(t) + " (|x| > 1e6); reduce the step size");
        }
      }
    }
  });
}

}  // namespace

CorrectionResult correct(const SampleSet& init, const ModelDescriptor& m, const ErrorMetric& metric,
                         const CorrectionOptions& opts, std::uint64_t seed) {
  require(opts.tolerance > 0.0, "tolerance must be positive");
  require(opts.max_sweeps >= 1, "max_sweeps must be at least 1");
  require(opts.check_every >= 1, "check_every must be at least 1");
  require(opts.langevin_step > 0.0, "Langevin step must be positive");
  check_init(init, m);

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  CorrectionResult out{init, {}};
  auto& rep = out.report;
  std::vector<Rng> rngs;
  const std::size_t blocks = std::min(kChainBlocks, init.size());
  for (std::size_t b = 0; b < blocks; ++b) rngs.push_back(make_rng(seed, b));

  bool tracking = false;
  double previous = metric(out.samples);
  rep.trace.push_back({0, previous, elapsed()});
  rep.converged = previous <= opts.tolerance;
  tracking = previous <= 2.0 * opts.tolerance;

  while (!rep.converged && rep.sweeps_used < opts.max_sweeps) {
    const std::size_t step = std::min(opts.check_every, opts.max_sweeps - rep.sweeps_used);
    if (const auto* ising = std::get_if<IsingModel>(&m.model)) {
      advance_spins(out.samples, *ising, rngs, step);
    } else {
      advance_continuous(out.samples, m, rngs, step, opts.langevin_step);
    }
    rep.sweeps_used += step;
    const double err = metric(out.samples);
    rep.trace.push_back({rep.sweeps_used, err, elapsed()});
    if (tracking) rep.max_regression = std::max(rep.max_regression, err - previous);
    tracking = tracking || err <= 2.0 * opts.tolerance;
    previous = err;
    rep.converged = err <= opts.tolerance;
  }
  rep.wall_time = elapsed();
  return out;
}

CorrectionResult correct(const SampleSet& init, const ModelDescriptor& m, const QoIRecord& target,
                         const CorrectionOptions& opts, std::uint64_t seed) {
  if (target.kind() != m.qoi_kind) {
    fail(ErrorKind::invalid_argument, "QoI kind mismatch: target is " + std::string(to_string(target.kind())) +
                                          ", model conserves " + std::string(to_string(m.qoi_kind)));
  }
  if (const auto* mom = std::get_if<Moments>(&target.payload)) {
    require(static_cast<std::size_t>(mom->m1.size()) == m.dim(), "QoI target dimension does not match the model");
  }
  std::vector<Edge> edges;
  if (const auto* p = std::get_if<Phi4Model>(&m.model)) edges = p->edges();
  const ErrorMetric metric = [&](const SampleSet& s) { return qoi_error(target, s, edges); };
  return correct(init, m, metric, opts, seed);
}

SampleSet random_init(const SampleSet& like, std::uint64_t seed) {
  SampleSet out(like.kind(), like.size(), like.dim(), like.has_shape() ? like.shape() : std::vector<std::size_t>{});
  const std::size_t m = like.size();
  const std::size_t blocks = std::min(kChainBlocks, m);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = make_rng(seed, b);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      auto row = out.row(i);
      if (like.kind() == SampleKind::spin) {
        for (double& v : row) v = (rng() >> 63) ? 1.0 : -1.0;
      } else {
        fill_normal(rng, row);
      }
    }
  });
  return out;
}

}  // namespace srs
