#pragma once

// Experiment configuration, end-to-end runs across compression levels and
// seeds, the scaling study, and the building blocks of the CLI subcommands.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srs/codec.hpp"
#include "srs/lattice.hpp"
#include "srs/learning.hpp"
#include "srs/model.hpp"
#include "srs/qoi.hpp"
#include "srs/sample_set.hpp"
#include "srs/sampling.hpp"
#include "srs/serialize.hpp"

namespace srs {

enum class ExperimentKind {
  ising_synthetic,
  ising_tv,
  dwave_like_ingest,
  gaussian,
  phi4,
  temperature,
  scaling_gaussian,
  scaling_concat
};

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_from_string(std::string_view s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ising_synthetic;
  std::size_t m_samples = 100000;
  std::vector<std::size_t> shape{4, 4};
  std::vector<double> compression_levels{0.1, 0.3, 0.5, 0.7, 0.9};
  double tolerance = 0.05;
  std::size_t max_sweeps = 100;
  std::size_t check_every = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool random_baseline = false;
  std::size_t random_max_sweeps = 2000;

  // Ising
  double coupling_max = 0.4;
  Boundary boundary = Boundary::open;
  std::string input;  ///< SRSX spin file for dwave_like_ingest

  // Gaussian
  double max_cond = 50.0;
  double kappa = 10.0;
  double langevin_step = 0.05;

  // Phi^4: parameters drawn uniformly from these ranges
  std::array<double, 2> alpha_range{0.1, 0.12};
  std::array<double, 2> beta_range{0.2, 0.22};
  std::array<double, 2> gamma_range{0.3, 0.32};
  std::size_t phi4_steps = 50000;
  double phi4_dt = 0.001;

  // Temperature
  double kelvin = 300.0;
  std::size_t atoms_per_row = 1;
  TemperatureSpec temperature;  ///< velocity_unit <= 0 selects the thermal velocity at `kelvin`

  // Scaling
  std::vector<std::size_t> sizes{50, 100, 200, 400};
  std::size_t repeats = 1;
  std::size_t concat_base_samples = 100000;

  std::size_t threads = 0;
};

/// Defaults for an experiment, adjusted per kind (shape, boundary, ...).
ExperimentConfig default_config(ExperimentKind kind);

/// Reads a config document on top of the defaults of its "experiment" kind.
/// Unknown keys are rejected with ErrorKind::config.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

/// Throws ErrorKind::config on out-of-range fields.
void validate(const ExperimentConfig& c);

struct RunRow {
  double compression = 0;
  std::uint64_t seed = 0;
  double pre_error = 0;
  double post_error = 0;
  std::size_t sweeps = 0;
  bool converged = false;
  long long random_sweeps = -1;  ///< -1: baseline not run or not converged
  double mean_kept = 0;
  double retained_energy = 0;
  double param_error = 0;  ///< max |theta_hat - theta| against the generating model, NaN if unknown
  double learn_s = 0, codec_s = 0, correct_s = 0;
};

struct Summary {
  double mean = 0;
  double std = 0;  ///< sample standard deviation, 0 for a single value
};

Summary summarize(const std::vector<double>& v);

struct RunAggregate {
  double compression = 0;
  Summary pre_error, post_error, sweeps, random_sweeps, param_error;
  std::size_t converged = 0;
  std::size_t runs = 0;
};

struct RunReport {
  ExperimentKind experiment = ExperimentKind::ising_synthetic;
  double tolerance = 0;
  std::vector<RunRow> rows;

  std::vector<RunAggregate> aggregates() const;
  /// One row per (level, seed); timing columns are last.
  std::string to_csv() const;
  Json to_json() const;
};

RunReport run_experiment(const ExperimentConfig& cfg);

struct ScalingPoint {
  std::size_t n = 0;
  double learn_s = 0, codec_s = 0, correct_s = 0;
  double sweeps = 0;
  double post_error = 0;
};

struct ScalingReport {
  ExperimentKind experiment = ExperimentKind::scaling_gaussian;
  std::vector<ScalingPoint> points;  ///< averaged over repeats
  double learn_slope = 0, codec_slope = 0, correct_slope = 0;

  std::string to_csv() const;
  Json to_json() const;
};

ScalingReport run_scaling(const ExperimentConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- subcommand building blocks --------------------------------------------

struct GeneratedData {
  SampleSet samples;
  std::optional<ModelDescriptor> truth;  ///< generating model, when there is one
};

/// Synthetic data for the config's experiment kind, deterministic in seed.
GeneratedData generate_data(const ExperimentConfig& cfg, std::uint64_t seed);

enum class Family { automatic, ising, gaussian, phi4, temperature };
Family family_from_string(std::string_view s);

struct LearnResult {
  ModelDescriptor model;
  Json report;  ///< iterations, losses, convergence, wall time
};

/// Spin data -> Ising (GRISE); continuous -> Gaussian by default, Phi4 on a
/// lattice with `boundary` edges, or a Gaussian conserving temperature.
LearnResult learn_model(const SampleSet& s, Family family, Boundary boundary = Boundary::periodic);

/// Edge set used for Phi4 statistics on this data.
std::vector<Edge> edges_for(const SampleSet& s, Boundary boundary);

/// QoIs of the model's family, then the archive at e_presv = 1 - compression.
Archive compress_command(const SampleSet& s, const ModelDescriptor& model, double compression,
                         double tolerance, const TemperatureSpec& temp, CompressionStats* stats);

struct RestoreResult {
  SampleSet samples;
  std::optional<CorrectionReport> report;
};

RestoreResult restore_command(const Archive& a, const CorrectionOptions& opts, std::uint64_t seed,
                              bool apply_correction);

/// Moment, Phi4, temperature and TV differences between two sample files;
/// only the metrics that apply to the data are present.
Json evaluate_command(const SampleSet& original, const SampleSet& recon, std::optional<QoiKind> kind,
                      Boundary boundary, const TemperatureSpec& temp);

}  // namespace srs
