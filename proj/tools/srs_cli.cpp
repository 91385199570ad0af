// srs: generate, learn, compress, restore and evaluate sample sets, and run
// the experiment and scaling studies.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/parallel.hpp"
#include "srs/pipeline.hpp"

namespace {

using namespace srs;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string input;
  std::string output;
  std::optional<double> compression;
  std::optional<double> tolerance;
  std::optional<std::size_t> max_sweeps;
  std::optional<std::size_t> threads;
  bool no_correct = false;

  std::string experiment;
  std::string model;
  std::string reconstructed;
  std::string report;
  std::string json_output;
  std::string model_output;
  std::string family = "auto";
  std::string boundary = "periodic";
  std::string qoi;
  std::optional<double> langevin_step;
  std::optional<std::size_t> check_every;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "failed reading '" + path + "'");
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

void need(const std::string& value, const char* flag) {
  if (value.empty()) fail(ErrorKind::config, std::string(flag) + " is required");
}

Boundary boundary_of(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  fail(ErrorKind::config, "--boundary must be 'open' or 'periodic'");
}

// flags > config file > defaults
ExperimentConfig load_config(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = config_from_json(parse_json(slurp(f.config)));
    if (!f.experiment.empty() && experiment_from_string(f.experiment) != c.experiment) {
      fail(ErrorKind::config, "--experiment disagrees with the config file");
    }
  } else {
    c = default_config(f.experiment.empty() ? ExperimentKind::ising_synthetic : experiment_from_string(f.experiment));
  }
  if (f.seed) c.seeds = {*f.seed};
  if (f.compression) c.compression_levels = {*f.compression};
  if (f.tolerance) c.tolerance = *f.tolerance;
  if (f.max_sweeps) c.max_sweeps = *f.max_sweeps;
  if (f.check_every) c.check_every = *f.check_every;
  if (f.langevin_step) c.langevin_step = *f.langevin_step;
  if (f.threads) c.threads = *f.threads;
  if (!f.input.empty()) c.input = f.input;
  validate(c);
  return c;
}

TemperatureSpec temperature_spec(const Flags& f) {
  if (f.config.empty()) return {};
  const ExperimentConfig c = config_from_json(parse_json(slurp(f.config)));
  TemperatureSpec spec = c.temperature;
  if (!(spec.velocity_unit > 0.0)) spec.velocity_unit = thermal_velocity(spec, c.kelvin);
  return spec;
}

int cmd_generate(const Flags& f) {
  need(f.output, "--output");
  const ExperimentConfig c = load_config(f);
  const GeneratedData d = generate_data(c, c.seeds.front());
  write_samples(f.output, d.samples);
  if (!f.model_output.empty() && d.truth) emit(f.model_output, dump(to_json(*d.truth), 2));
  std::cerr << "wrote " << d.samples.size() << " x " << d.samples.dim() << " samples to " << f.output << '\n';
  return 0;
}

int cmd_learn(const Flags& f) {
  need(f.input, "--input");
  const SampleSet s = read_samples(f.input);
  const LearnResult r = learn_model(s, family_from_string(f.family), boundary_of(f.boundary));
  emit(f.output, dump(to_json(r.model), 2));
  if (!f.report.empty()) emit(f.report, dump(r.report, 2));
  return 0;
}

int cmd_compress(const Flags& f) {
  need(f.input, "--input");
  need(f.model, "--model");
  need(f.output, "--output");
  const SampleSet s = read_samples(f.input);
  const ModelDescriptor m = model_from_json(parse_json(slurp(f.model)));
  CompressionStats stats;
  const Archive a = compress_command(s, m, f.compression.value_or(0.5), f.tolerance.value_or(0.05),
                                     temperature_spec(f), &stats);
  write_archive(f.output, a);
  std::cerr << "kept " << stats.mean_kept << " of " << s.dim() << " coefficients per sample, "
            << stats.payload_bytes << " bytes\n";
  return 0;
}

int cmd_restore(const Flags& f) {
  need(f.input, "--input");
  need(f.output, "--output");
  const Archive a = read_archive(f.input);
  CorrectionOptions opts;
  opts.tolerance = f.tolerance.value_or(a.qoi.tolerance);
  if (f.max_sweeps) opts.max_sweeps = *f.max_sweeps;
  if (f.check_every) opts.check_every = *f.check_every;
  if (f.langevin_step) opts.langevin_step = *f.langevin_step;
  const RestoreResult r = restore_command(a, opts, f.seed.value_or(1), !f.no_correct);
  write_samples(f.output, r.samples);
  if (r.report) {
    if (!f.report.empty()) emit(f.report, r.report->to_json());
    std::cerr << (r.report->converged ? "converged" : "not converged") << " after " << r.report->sweeps_used
              << " sweeps, error " << r.report->trace.back().error << '\n';
    if (!r.report->converged) return 3;
  }
  return 0;
}

int cmd_evaluate(const Flags& f) {
  need(f.input, "--input");
  need(f.reconstructed, "--reconstructed");
  const SampleSet a = read_samples(f.input);
  const SampleSet b = read_samples(f.reconstructed);
  std::optional<QoiKind> kind;
  if (!f.qoi.empty()) kind = qoi_kind_from_string(f.qoi);
  emit(f.output, dump(evaluate_command(a, b, kind, boundary_of(f.boundary), temperature_spec(f)), 2));
  return 0;
}

int cmd_experiment(const Flags& f) {
  const ExperimentConfig c = load_config(f);
  const RunReport r = run_experiment(c);
  emit(f.output, r.to_csv());
  if (!f.json_output.empty()) emit(f.json_output, dump(r.to_json(), 2));
  return 0;
}

int cmd_scaling(const Flags& f) {
  Flags g = f;
  if (g.config.empty() && g.experiment.empty()) g.experiment = "scaling_gaussian";
  const ExperimentConfig c = load_config(g);
  const ScalingReport r = run_scaling(c);
  emit(f.output, r.to_csv());
  if (!f.json_output.empty()) emit(f.json_output, dump(r.to_json(), 2));
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument: return 2;
    case ErrorKind::numerical: return 3;
    case ErrorKind::format:
    case ErrorKind::io: return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample compression with model-based super-resolution"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON experiment config");
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--input", f.input, "input file");
    sub->add_option("--output", f.output, "output file ('-' or empty for stdout where text)");
    sub->add_option("--compression", f.compression, "compression level C in [0, 1)");
    sub->add_option("--tolerance", f.tolerance, "QoI error tolerance");
    sub->add_option("--max-sweeps", f.max_sweeps, "correction sweep budget");
    sub->add_option("--threads", f.threads, "worker thread cap");
    sub->add_flag("--no-correct", f.no_correct, "skip the correction phase");
  };

  auto* gen = app.add_subcommand("generate", "write synthetic samples");
  common(gen);
  gen->add_option("--experiment", f.experiment, "experiment kind when no config is given");
  gen->add_option("--model-output", f.model_output, "write the generating model as JSON");

  auto* learn = app.add_subcommand("learn", "fit a model to samples");
  common(learn);
  learn->add_option("--family", f.family, "auto, ising, gaussian, phi4 or temperature");
  learn->add_option("--boundary", f.boundary, "lattice boundary for phi4 edges");
  learn->add_option("--report", f.report, "learning report JSON");

  auto* comp = app.add_subcommand("compress", "build an archive from samples and a model");
  common(comp);
  comp->add_option("--model", f.model, "model JSON");

  auto* rest = app.add_subcommand("restore", "decompress an archive and correct it");
  common(rest);
  rest->add_option("--report", f.report, "correction report JSON");
  rest->add_option("--check-every", f.check_every, "sweeps between QoI checks");
  rest->add_option("--langevin-step", f.langevin_step, "Langevin step size");

  auto* eval = app.add_subcommand("evaluate", "compare two sample files");
  common(eval);
  eval->add_option("--reconstructed", f.reconstructed, "reconstructed sample file");
  eval->add_option("--qoi", f.qoi, "moments12, phi4_stats or temperature");
  eval->add_option("--boundary", f.boundary, "lattice boundary for phi4 statistics");

  auto* exp = app.add_subcommand("experiment", "run an experiment across levels and seeds");
  common(exp);
  exp->add_option("--experiment", f.experiment, "experiment kind when no config is given");
  exp->add_option("--json", f.json_output, "JSON report with aggregates");

  auto* scal = app.add_subcommand("scaling", "run the scaling study");
  common(scal);
  scal->add_option("--experiment", f.experiment, "scaling_gaussian or scaling_concat");
  scal->add_option("--json", f.json_output, "JSON report with slopes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (f.threads) set_thread_count(*f.threads);
    if (*gen) return cmd_generate(f);
    if (*learn) return cmd_learn(f);
    if (*comp) return cmd_compress(f);
    if (*rest) return cmd_restore(f);
    if (*eval) return cmd_evaluate(f);
    if (*exp) return cmd_experiment(f);
    if (*scal) return cmd_scaling(f);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
