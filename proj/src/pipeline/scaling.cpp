#include <chrono>
#include <cmath>
#include <sstream>

#include "pipeline_internal.hpp"
#include "srs/error.hpp"
#include "srs/parallel.hpp"
#include "srs/pipeline.hpp"

namespace srs {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "need at least two points");
  double mx = 0, my = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log-log fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0.0, "log-log fit needs distinct sizes");
  return sxy / sxx;
}

std::string ScalingReport::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "experiment,n,sweeps,post_error,learn_s,codec_s,correct_s\n";
  for (const auto& p : points) {
    out << to_string(experiment) << ',' << p.n << ',' << p.sweeps << ',' << p.post_error << ',' << p.learn_s
        << ',' << p.codec_s << ',' << p.correct_s << '\n';
  }
  return out.str();
}

Json ScalingReport::to_json() const {
  Json j;
  j["experiment"] = std::string(to_string(experiment));
  Json ps = Json::array();
  for (const auto& p : points) {
    ps.push_back({{"n", p.n},
                  {"sweeps", p.sweeps},
                  {"post_error", p.post_error},
                  {"learn_s", p.learn_s},
                  {"codec_s", p.codec_s},
                  {"correct_s", p.correct_s}});
  }
  j["points"] = std::move(ps);
  j["slopes"] = {{"learn", learn_slope}, {"codec", codec_slope}, {"correct", correct_slope}};
  return j;
}

ScalingReport run_scaling(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::scaling_gaussian && cfg.experiment != ExperimentKind::scaling_concat) {
    fail(ErrorKind::config, "scaling needs experiment scaling_gaussian or scaling_concat");
  }
  validate(cfg);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  using clock = std::chrono::steady_clock;
  const auto since = [](clock::time_point t) { return std::chrono::duration<double>(clock::now() - t).count(); };

  ScalingReport report;
  report.experiment = cfg.experiment;
  const double level = cfg.compression_levels.front();
  const std::uint64_t seed = cfg.seeds.front();
  for (const std::size_t n : cfg.sizes) {
    ExperimentConfig c = cfg;
    c.shape = {n};
    ScalingPoint pt;
    pt.n = n;
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
      const std::uint64_t s = detail::derive_seed(seed, 1000 * n + rep);
      const GeneratedData data = generate_data(c, s);

      auto t0 = clock::now();
      const LearnResult learned = learn_model(data.samples, detail::family_for(cfg.experiment));
      pt.learn_s += since(t0);

      const QoIRecord target = compute_qoi(learned.model.qoi_kind, data.samples, {}, cfg.temperature, cfg.tolerance);
      t0 = clock::now();
      const Archive archive = compress_set(data.samples, 1.0 - level, learned.model, target);
      const SampleSet init = decompress_set(archive);
      pt.codec_s += since(t0);

      CorrectionOptions opts;
      opts.tolerance = cfg.tolerance;
      opts.max_sweeps = cfg.max_sweeps;
      opts.check_every = cfg.check_every;
      opts.langevin_step = cfg.langevin_step;
      t0 = clock::now();
      const CorrectionResult r = correct(init, learned.model, target, opts, detail::derive_seed(s, 3));
      pt.correct_s += since(t0);
      pt.sweeps += static_cast<double>(r.report.sweeps_used);
      pt.post_error += r.report.trace.back().error;
    }
    const auto k = static_cast<double>(cfg.repeats);
    pt.learn_s /= k;
    pt.codec_s /= k;
    pt.correct_s /= k;
    pt.sweeps /= k;
    pt.post_error /= k;
    report.points.push_back(pt);
  }

  if (report.points.size() >= 2) {
    std::vector<double> x, l, c, r;
    for (const auto& p : report.points) {
      x.push_back(static_cast<double>(p.n));
      l.push_back(p.learn_s);
      c.push_back(p.codec_s);
      r.push_back(p.correct_s);
    }
    report.learn_slope = loglog_slope(x, l);
    report.codec_slope = loglog_slope(x, c);
    report.correct_slope = loglog_slope(x, r);
  }
  return report;
}

}  // namespace srs
