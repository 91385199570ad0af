#include <cmath>
#include <set>
#include <string>

#include "srs/error.hpp"
#include "srs/pipeline.hpp"

namespace srs {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::ising_synthetic, "ising_synthetic"},
    {ExperimentKind::ising_tv, "ising_tv"},
    {ExperimentKind::dwave_like_ingest, "dwave_like_ingest"},
    {ExperimentKind::gaussian, "gaussian"},
    {ExperimentKind::phi4, "phi4"},
    {ExperimentKind::temperature, "temperature"},
    {ExperimentKind::scaling_gaussian, "scaling_gaussian"},
    {ExperimentKind::scaling_concat, "scaling_concat"},
};

std::string_view boundary_name(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  fail(ErrorKind::config, "boundary must be 'open' or 'periodic', got '" + s + "'");
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view s) {
  for (const auto& [kind, name] : kNames) {
    if (name == s) return kind;
  }
  fail(ErrorKind::config, "unknown experiment '" + std::string(s) + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.temperature.velocity_unit = 0.0;
  switch (kind) {
    case ExperimentKind::ising_synthetic:
      c.max_sweeps = 15;
      break;
    case ExperimentKind::ising_tv:
      c.tolerance = 0.08;
      c.max_sweeps = 20;
      break;
    case ExperimentKind::dwave_like_ingest:
      c.max_sweeps = 15;
      c.shape = {16};
      break;
    case ExperimentKind::gaussian:
      c.shape = {16};
      c.max_sweeps = 10;
      break;
    case ExperimentKind::phi4:
      c.shape = {16, 16};
      c.boundary = Boundary::periodic;
      c.m_samples = 10000;
      c.max_sweeps = 30;
      c.seeds = {1};
      break;
    case ExperimentKind::temperature:
      c.shape = {3};
      c.m_samples = 10000;
      c.tolerance = 0.5;
      c.max_sweeps = 60;
      c.compression_levels = {0.9};
      break;
    case ExperimentKind::scaling_gaussian:
      c.m_samples = 10000;
      c.max_sweeps = 200;
      c.compression_levels = {0.9};
      c.seeds = {1};
      break;
    case ExperimentKind::scaling_concat:
      c.m_samples = 10000;
      c.max_sweeps = 2000;
      c.compression_levels = {0.9};
      c.sizes = {16, 32, 64};
      c.seeds = {1};
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::config, "config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "m_samples", "shape", "compression_levels", "tolerance", "max_sweeps",
      "check_every", "seeds", "random_baseline", "random_max_sweeps", "coupling_max", "boundary",
      "input", "max_cond", "kappa", "langevin_step", "alpha_range", "beta_range", "gamma_range",
      "phi4_steps", "phi4_dt", "kelvin", "atoms_per_row", "masses", "n_dim", "n_fix_dofs",
      "boltzmann", "velocity_unit", "sizes", "repeats", "concat_base_samples", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail(ErrorKind::config, "unknown config field '" + key + "'");
  }

  std::string kind = "ising_synthetic";
  read(j, "experiment", kind);
  ExperimentConfig c = default_config(experiment_from_string(kind));
  read(j, "m_samples", c.m_samples);
  read(j, "shape", c.shape);
  read(j, "compression_levels", c.compression_levels);
  read(j, "tolerance", c.tolerance);
  read(j, "max_sweeps", c.max_sweeps);
  read(j, "check_every", c.check_every);
  read(j, "seeds", c.seeds);
  read(j, "random_baseline", c.random_baseline);
  read(j, "random_max_sweeps", c.random_max_sweeps);
  read(j, "coupling_max", c.coupling_max);
  if (j.contains("boundary")) {
    std::string b;
    read(j, "boundary", b);
    c.boundary = boundary_from(b);
  }
  read(j, "input", c.input);
  read(j, "max_cond", c.max_cond);
  read(j, "kappa", c.kappa);
  read(j, "langevin_step", c.langevin_step);
  read(j, "alpha_range", c.alpha_range);
  read(j, "beta_range", c.beta_range);
  read(j, "gamma_range", c.gamma_range);
  read(j, "phi4_steps", c.phi4_steps);
  read(j, "phi4_dt", c.phi4_dt);
  read(j, "kelvin", c.kelvin);
  read(j, "atoms_per_row", c.atoms_per_row);
  read(j, "masses", c.temperature.masses);
  read(j, "n_dim", c.temperature.n_dim);
  read(j, "n_fix_dofs", c.temperature.n_fix_dofs);
  read(j, "boltzmann", c.temperature.boltzmann);
  read(j, "velocity_unit", c.temperature.velocity_unit);
  read(j, "sizes", c.sizes);
  read(j, "repeats", c.repeats);
  read(j, "concat_base_samples", c.concat_base_samples);
  read(j, "threads", c.threads);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["m_samples"] = c.m_samples;
  j["shape"] = c.shape;
  j["compression_levels"] = c.compression_levels;
  j["tolerance"] = c.tolerance;
  j["max_sweeps"] = c.max_sweeps;
  j["check_every"] = c.check_every;
  j["seeds"] = c.seeds;
  j["random_baseline"] = c.random_baseline;
  j["random_max_sweeps"] = c.random_max_sweeps;
  j["coupling_max"] = c.coupling_max;
  j["boundary"] = std::string(boundary_name(c.boundary));
  j["input"] = c.input;
  j["max_cond"] = c.max_cond;
  j["kappa"] = c.kappa;
  j["langevin_step"] = c.langevin_step;
  j["alpha_range"] = c.alpha_range;
  j["beta_range"] = c.beta_range;
  j["gamma_range"] = c.gamma_range;
  j["phi4_steps"] = c.phi4_steps;
  j["phi4_dt"] = c.phi4_dt;
  j["kelvin"] = c.kelvin;
  j["atoms_per_row"] = c.atoms_per_row;
  j["masses"] = c.temperature.masses;
  j["n_dim"] = c.temperature.n_dim;
  j["n_fix_dofs"] = c.temperature.n_fix_dofs;
  j["boltzmann"] = c.temperature.boltzmann;
  j["velocity_unit"] = c.temperature.velocity_unit;
  j["sizes"] = c.sizes;
  j["repeats"] = c.repeats;
  j["concat_base_samples"] = c.concat_base_samples;
  j["threads"] = c.threads;
  return j;
}

void validate(const ExperimentConfig& c) {
  const auto bad = [](const std::string& what) { fail(ErrorKind::config, what); };
  if (c.m_samples < 2) bad("m_samples must be at least 2");
  if (c.shape.empty() || shape_product(c.shape) == 0) bad("shape must be non-empty with positive axes");
  if (c.seeds.empty()) bad("seeds must be non-empty");
  if (c.compression_levels.empty()) bad("compression_levels must be non-empty");
  for (double level : c.compression_levels) {
    if (!(level > 0.0 && level < 1.0)) bad("compression levels must lie in (0, 1)");
  }
  if (!(c.tolerance > 0.0)) bad("tolerance must be positive");
  if (c.max_sweeps < 1 || c.check_every < 1) bad("max_sweeps and check_every must be at least 1");
  if (!(c.langevin_step > 0.0)) bad("langevin_step must be positive");
  if (!(c.phi4_dt > 0.0)) bad("phi4_dt must be positive");
  for (const auto* r : {&c.alpha_range, &c.beta_range, &c.gamma_range}) {
    if (!((*r)[0] <= (*r)[1])) bad("parameter ranges must be [low, high]");
  }
  if (c.atoms_per_row < 1) bad("atoms_per_row must be at least 1");
  if (c.sizes.empty()) bad("sizes must be non-empty");
  if (c.repeats < 1) bad("repeats must be at least 1");
}

}  // namespace srs
