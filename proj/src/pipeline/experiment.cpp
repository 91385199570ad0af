#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "pipeline_internal.hpp"
#include "srs/error.hpp"
#include "srs/parallel.hpp"
#include "srs/pipeline.hpp"

namespace srs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void put(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

Json summary_json(const Summary& s) { return {{"mean", number_or_null(s.mean)}, {"std", number_or_null(s.std)}}; }

}  // namespace

Summary summarize(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
}

std::vector<RunAggregate> RunReport::aggregates() const {
  std::map<double, std::vector<const RunRow*>> by_level;
  std::vector<double> order;
  for (const auto& r : rows) {
    if (!by_level.contains(r.compression)) order.push_back(r.compression);
    by_level[r.compression].push_back(&r);
  }
  std::vector<RunAggregate> out;
  for (double level : order) {
    const auto& group = by_level[level];
    std::vector<double> pre, post, sweeps, random, param;
    RunAggregate a;
    a.compression = level;
    a.runs = group.size();
    for (const RunRow* r : group) {
      pre.push_back(r->pre_error);
      post.push_back(r->post_error);
      sweeps.push_back(static_cast<double>(r->sweeps));
      if (r->random_sweeps >= 0) random.push_back(static_cast<double>(r->random_sweeps));
      if (!std::isnan(r->param_error)) param.push_back(r->param_error);
      a.converged += r->converged ? 1 : 0;
    }
    a.pre_error = summarize(pre);
    a.post_error = summarize(post);
    a.sweeps = summarize(sweeps);
    a.random_sweeps = summarize(random);
    a.param_error = summarize(param);
    out.push_back(a);
  }
  return out;
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "experiment,compression,seed,pre_error,post_error,sweeps,converged,random_init_sweeps,"
         "mean_kept,retained_energy,param_error,learn_s,codec_s,correct_s\n";
  for (const auto& r : rows) {
    out << to_string(experiment) << ',' << r.compression << ',' << r.seed << ',';
    put(out, r.pre_error);
    out << ',';
    put(out, r.post_error);
    out << ',' << r.sweeps << ',' << (r.converged ? 1 : 0) << ',' << r.random_sweeps << ',' << r.mean_kept
        << ',' << r.retained_energy << ',';
    put(out, r.param_error);
    out << ',' << r.learn_s << ',' << r.codec_s << ',' << r.correct_s << '\n';
  }
  return out.str();
}

Json RunReport::to_json() const {
  Json j;
  j["experiment"] = std::string(to_string(experiment));
  j["tolerance"] = tolerance;
  Json rs = Json::array();
  for (const auto& r : rows) {
    rs.push_back({{"compression", r.compression},
                  {"seed", r.seed},
                  {"pre_error", number_or_null(r.pre_error)},
                  {"post_error", number_or_null(r.post_error)},
                  {"sweeps", r.sweeps},
                  {"converged", r.converged},
                  {"random_init_sweeps", r.random_sweeps},
                  {"mean_kept", r.mean_kept},
                  {"retained_energy", r.retained_energy},
                  {"param_error", number_or_null(r.param_error)},
                  {"learn_s", r.learn_s},
                  {"codec_s", r.codec_s},
                  {"correct_s", r.correct_s}});
  }
  j["rows"] = std::move(rs);
  Json ag = Json::array();
  for (const auto& a : aggregates()) {
    ag.push_back({{"compression", a.compression},
                  {"runs", a.runs},
                  {"converged", a.converged},
                  {"pre_error", summary_json(a.pre_error)},
                  {"post_error", summary_json(a.post_error)},
                  {"sweeps", summary_json(a.sweeps)},
                  {"random_init_sweeps", summary_json(a.random_sweeps)},
                  {"param_error", summary_json(a.param_error)}});
  }
  j["aggregates"] = std::move(ag);
  return j;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  const TemperatureSpec spec = cfg.experiment == ExperimentKind::temperature ? detail::resolved_spec(cfg)
                                                                             : cfg.temperature;
  RunReport report;
  report.experiment = cfg.experiment;
  report.tolerance = cfg.tolerance;

  for (const std::uint64_t seed : cfg.seeds) {
    const GeneratedData data = generate_data(cfg, seed);
    auto t0 = std::chrono::steady_clock::now();
    const LearnResult learned = learn_model(data.samples, detail::family_for(cfg.experiment), cfg.boundary);
    const double learn_s = seconds_since(t0);
    const double param_error = detail::parameter_error(learned.model, data.truth);
    const ModelDescriptor& model = learned.model;

    std::vector<Edge> edges;
    if (const auto* p = std::get_if<Phi4Model>(&model.model)) edges = p->edges();
    const QoIRecord target = compute_qoi(model.qoi_kind, data.samples, edges, spec, cfg.tolerance);

    ErrorMetric metric;
    if (cfg.experiment == ExperimentKind::ising_tv) {
      if (!data.truth) fail(ErrorKind::config, "ising_tv needs a generating model");
      auto exact = std::make_shared<std::vector<double>>(
          exact_ising_distribution(std::get<IsingModel>(data.truth->model)));
      metric = [exact](const SampleSet& s) { return tv_distance(spin_histogram(s), *exact); };
    } else {
      metric = [&target, &edges](const SampleSet& s) { return qoi_error(target, s, edges); };
    }

    CorrectionOptions opts;
    opts.tolerance = cfg.tolerance;
    opts.max_sweeps = cfg.max_sweeps;
    opts.check_every = cfg.check_every;
    opts.langevin_step = cfg.langevin_step;

    long long random_sweeps = -1;
    if (cfg.random_baseline) {
      CorrectionOptions ro = opts;
      ro.max_sweeps = cfg.random_max_sweeps;
      const CorrectionResult r =
          correct(random_init(data.samples, detail::derive_seed(seed, 10)), model, metric, ro,
                  detail::derive_seed(seed, 11));
      if (r.report.converged) random_sweeps = static_cast<long long>(r.report.sweeps_used);
    }

    for (std::size_t li = 0; li < cfg.compression_levels.size(); ++li) {
      const double level = cfg.compression_levels[li];
      RunRow row;
      row.compression = level;
      row.seed = seed;
      row.random_sweeps = random_sweeps;
      row.param_error = param_error;
      row.learn_s = learn_s;

      t0 = std::chrono::steady_clock::now();
      CompressionStats stats;
      const Archive archive = compress_set(data.samples, 1.0 - level, model, target, &stats);
      const SampleSet init = decompress_set(archive);
      row.codec_s = seconds_since(t0);
      row.mean_kept = stats.mean_kept;
      row.retained_energy = stats.retained_energy;
      row.pre_error = metric(init);

      t0 = std::chrono::steady_clock::now();
      const CorrectionResult r = correct(init, model, metric, opts, detail::derive_seed(seed, 20 + li));
      row.correct_s = seconds_since(t0);
      row.post_error = r.report.trace.back().error;
      row.sweeps = r.report.sweeps_used;
      row.converged = r.report.converged;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace srs
