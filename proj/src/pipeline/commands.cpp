#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pipeline_internal.hpp"
#include "srs/error.hpp"
#include "srs/pipeline.hpp"

namespace srs {

namespace detail {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finaliser over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform_in(Rng& rng, const std::array<double, 2>& range) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return range[0] + (range[1] - range[0]) * u;
}

TemperatureSpec resolved_spec(const ExperimentConfig& cfg) {
  TemperatureSpec spec = cfg.temperature;
  if (!(spec.velocity_unit > 0.0)) spec.velocity_unit = thermal_velocity(spec, cfg.kelvin);
  return spec;
}

Family family_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ising_synthetic:
    case ExperimentKind::ising_tv:
    case ExperimentKind::dwave_like_ingest:
    case ExperimentKind::scaling_concat: return Family::ising;
    case ExperimentKind::gaussian:
    case ExperimentKind::scaling_gaussian: return Family::gaussian;
    case ExperimentKind::phi4: return Family::phi4;
    case ExperimentKind::temperature: return Family::temperature;
  }
  return Family::automatic;
}

double parameter_error(const ModelDescriptor& learned, const std::optional<ModelDescriptor>& truth) {
  if (!truth || truth->model.index() != learned.model.index()) return std::numeric_limits<double>::quiet_NaN();
  if (const auto* a = std::get_if<IsingModel>(&learned.model)) {
    const auto& b = std::get<IsingModel>(truth->model);
    return std::max((a->couplings() - b.couplings()).cwiseAbs().maxCoeff(),
                    (a->fields() - b.fields()).cwiseAbs().maxCoeff());
  }
  if (const auto* a = std::get_if<GaussianModel>(&learned.model)) {
    const auto& b = std::get<GaussianModel>(truth->model);
    return (a->precision() - b.precision()).cwiseAbs().maxCoeff();
  }
  const auto& a = std::get<Phi4Model>(learned.model);
  const auto& b = std::get<Phi4Model>(truth->model);
  return std::max({std::abs(a.alpha() - b.alpha()), std::abs(a.beta() - b.beta()),
                   std::abs(a.gamma() - b.gamma())});
}

namespace {

SampleSet with_shape(SampleSet s, const std::vector<std::size_t>& shape) {
  if (shape.size() <= 1) return s;
  return SampleSet(s.kind(), s.dim(), std::vector<double>(s.values().begin(), s.values().end()), shape);
}

// Two 8-qubit K_{4,4} cells joined by couplers between matching qubits, a
// small stand-in for annealer hardware graphs.
std::vector<Edge> chimera16_edges() {
  std::vector<Edge> e;
  for (std::uint32_t cell = 0; cell < 2; ++cell) {
    const std::uint32_t base = 8 * cell;
    for (std::uint32_t a = 0; a < 4; ++a) {
      for (std::uint32_t b = 4; b < 8; ++b) e.push_back({base + a, base + b});
    }
  }
  for (std::uint32_t a = 0; a < 4; ++a) e.push_back({a, a + 8});
  return e;
}

IsingModel chimera_model(double coupling_max, Rng& rng) {
  Matrix j = Matrix::Zero(16, 16);
  Vector h(16);
  for (const Edge& e : chimera16_edges()) {
    const double v = coupling_max * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
    j(e.a, e.b) = v;
    j(e.b, e.a) = v;
  }
  for (Eigen::Index i = 0; i < 16; ++i) h(i) = 0.1 * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
  return IsingModel(std::move(j), std::move(h));
}

GeneratedData exact_ising_data(const IsingModel& model, const ExperimentConfig& cfg, std::uint64_t seed,
                               const std::vector<std::size_t>& shape) {
  const auto table = exact_ising_distribution(model);
  SampleSet s = sample_exact(table, model.dim(), cfg.m_samples, derive_seed(seed, 2));
  return {with_shape(std::move(s), shape), ModelDescriptor(model)};
}

}  // namespace

}  // namespace detail

using detail::derive_seed;

GeneratedData generate_data(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, 1));
  const std::size_t n = shape_product(cfg.shape);
  switch (cfg.experiment) {
    case ExperimentKind::ising_synthetic:
    case ExperimentKind::ising_tv: {
      const IsingModel m = random_lattice_ising(cfg.shape, cfg.boundary, cfg.coupling_max, rng);
      return detail::exact_ising_data(m, cfg, seed, cfg.shape);
    }
    case ExperimentKind::dwave_like_ingest: {
      if (!cfg.input.empty()) {
        SampleSet s = read_samples(cfg.input);
        if (s.kind() != SampleKind::spin) fail(ErrorKind::config, "dwave_like_ingest needs a spin sample file");
        return {std::move(s), std::nullopt};
      }
      return detail::exact_ising_data(detail::chimera_model(cfg.coupling_max, rng), cfg, seed, {});
    }
    case ExperimentKind::gaussian:
    case ExperimentKind::scaling_gaussian: {
      Vector mu(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = detail::uniform_in(rng, {-0.5, 0.5});
      const Matrix sigma = cfg.experiment == ExperimentKind::gaussian
                               ? random_covariance(n, cfg.max_cond, rng)
                               : well_conditioned_covariance(n, cfg.kappa, rng);
      Matrix theta = sigma.inverse();
      theta = (0.5 * (theta + theta.transpose())).eval();
      SampleSet s = generate_gaussian(mu, sigma, cfg.m_samples, derive_seed(seed, 2));
      return {std::move(s), ModelDescriptor(GaussianModel(mu, std::move(theta)))};
    }
    case ExperimentKind::phi4: {
      const double alpha = detail::uniform_in(rng, cfg.alpha_range);
      const double beta = detail::uniform_in(rng, cfg.beta_range);
      const double gamma = detail::uniform_in(rng, cfg.gamma_range);
      const Phi4Model m(n, alpha, beta, gamma, lattice_edges(cfg.shape, cfg.boundary));
      SampleSet s = generate_phi4(m, cfg.phi4_steps, cfg.phi4_dt, cfg.m_samples, derive_seed(seed, 2),
                                  cfg.shape.size() > 1 ? cfg.shape : std::vector<std::size_t>{});
      return {std::move(s), ModelDescriptor(m)};
    }
    case ExperimentKind::temperature: {
      const TemperatureSpec spec = detail::resolved_spec(cfg);
      SampleSet s = maxwell_boltzmann(cfg.m_samples, cfg.atoms_per_row, cfg.kelvin, spec, derive_seed(seed, 2));
      // In reduced units each component has variance k_B T / (m u^2).
      const std::size_t dim = s.dim();
      Matrix theta = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      const auto nd = static_cast<std::size_t>(spec.n_dim);
      for (std::size_t c = 0; c < dim; ++c) {
        const double mass = spec.masses.size() == 1 ? spec.masses[0] : spec.masses[c / nd];
        theta(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) =
            mass * spec.velocity_unit * spec.velocity_unit / (spec.boltzmann * cfg.kelvin);
      }
      return {std::move(s), ModelDescriptor(GaussianModel(Vector::Zero(static_cast<Eigen::Index>(dim)), std::move(theta)),
                                            QoiKind::temperature)};
    }
    case ExperimentKind::scaling_concat: {
      if (n % 16 != 0) fail(ErrorKind::config, "scaling_concat sizes must be multiples of 16");
      ExperimentConfig base = cfg;
      base.m_samples = cfg.concat_base_samples;
      std::vector<SampleSet> parts;
      for (std::size_t k = 0; k < n / 16; ++k) {
        const std::vector<std::size_t> cell{4, 4};
        const IsingModel m = random_lattice_ising(cell, Boundary::open, cfg.coupling_max, rng);
        parts.push_back(detail::exact_ising_data(m, base, derive_seed(seed, 100 + k), {}).samples);
      }
      return {concat_datasets(parts, cfg.m_samples, derive_seed(seed, 2)), std::nullopt};
    }
  }
  fail(ErrorKind::config, "unsupported experiment");
}

Family family_from_string(std::string_view s) {
  if (s == "auto") return Family::automatic;
  if (s == "ising") return Family::ising;
  if (s == "gaussian") return Family::gaussian;
  if (s == "phi4") return Family::phi4;
  if (s == "temperature") return Family::temperature;
  fail(ErrorKind::config, "unknown model family '" + std::string(s) + "'");
}

std::vector<Edge> edges_for(const SampleSet& s, Boundary boundary) {
  return lattice_edges(s.shape(), boundary);
}

LearnResult learn_model(const SampleSet& s, Family family, Boundary boundary) {
  if (family == Family::automatic) family = s.kind() == SampleKind::spin ? Family::ising : Family::gaussian;
  if ((family == Family::ising) != (s.kind() == SampleKind::spin)) {
    fail(ErrorKind::config, "model family does not fit the sample kind");
  }
  LearnResult out;
  Json& rep = out.report;
  switch (family) {
    case Family::ising: {
      GriseResult r = grise_fit(s);
      std::size_t total = 0, worst = 0;
      Json losses = Json::array();
      for (const auto& n : r.nodes) {
        total += n.iterations;
        worst = std::max(worst, n.iterations);
        losses.push_back(n.loss);
      }
      rep["method"] = "grise";
      rep["converged"] = r.converged;
      rep["iterations_total"] = total;
      rep["iterations_max"] = worst;
      rep["final_loss"] = std::move(losses);
      rep["wall_time_s"] = r.wall_time;
      out.model = ModelDescriptor(std::move(r.model));
      break;
    }
    case Family::gaussian:
    case Family::temperature: {
      GaussianFit r = score_matching_gaussian(s);
      rep["method"] = "score_matching_gaussian";
      rep["converged"] = r.converged;
      rep["iterations"] = r.iterations;
      rep["residual"] = r.residual;
      rep["wall_time_s"] = r.wall_time;
      out.model = ModelDescriptor(std::move(r.model),
                                  family == Family::temperature ? QoiKind::temperature : QoiKind::moments12);
      break;
    }
    case Family::phi4: {
      if (!s.has_shape()) fail(ErrorKind::config, "Phi4 learning needs samples with a lattice shape");
      const auto start = std::chrono::steady_clock::now();
      Phi4Model m = score_matching_polynomial(s, edges_for(s, boundary));
      rep["method"] = "score_matching_phi4";
      rep["converged"] = true;
      rep["theta"] = {m.alpha(), m.beta(), m.gamma()};
      rep["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.model = ModelDescriptor(std::move(m));
      break;
    }
    case Family::automatic: break;
  }
  return out;
}

Archive compress_command(const SampleSet& s, const ModelDescriptor& model, double compression,
                         double tolerance, const TemperatureSpec& temp, CompressionStats* stats) {
  if (!(compression >= 0.0 && compression < 1.0)) {
    fail(ErrorKind::config, "compression level must lie in [0, 1)");
  }
  std::vector<Edge> edges;
  if (const auto* p = std::get_if<Phi4Model>(&model.model)) edges = p->edges();
  const QoIRecord qoi = compute_qoi(model.qoi_kind, s, edges, temp, tolerance);
  return compress_set(s, 1.0 - compression, model, qoi, stats);
}

RestoreResult restore_command(const Archive& a, const CorrectionOptions& opts, std::uint64_t seed,
                              bool apply_correction) {
  RestoreResult out{decompress_set(a), std::nullopt};
  if (!apply_correction) return out;
  CorrectionResult r = correct(out.samples, a.model, a.qoi, opts, seed);
  out.samples = std::move(r.samples);
  out.report = std::move(r.report);
  return out;
}

Json evaluate_command(const SampleSet& original, const SampleSet& recon, std::optional<QoiKind> kind,
                      Boundary boundary, const TemperatureSpec& temp) {
  if (original.dim() != recon.dim()) {
    fail(ErrorKind::invalid_argument, "sample files have different dimensions (" + std::to_string(original.dim()) +
                                          " vs " + std::to_string(recon.dim()) + ")");
  }
  if (original.kind() != recon.kind()) fail(ErrorKind::invalid_argument, "sample files have different kinds");
  Json j;
  j["n"] = original.dim();
  j["m_original"] = original.size();
  j["m_reconstructed"] = recon.size();
  const bool all = !kind.has_value();
  if ((all || kind == QoiKind::moments12) && original.size() >= 2 && recon.size() >= 2) {
    const MomentError e = moment_error(moments12(original), moments12(recon));
    j["moments12"] = {{"e1", e.e1}, {"e2", e.e2}, {"max", e.max()}};
  }
  if ((all && original.kind() == SampleKind::continuous && original.has_shape()) || kind == QoiKind::phi4_stats) {
    const auto edges = edges_for(original, boundary);
    const Phi4Stats a = phi4_stats(original, edges), b = phi4_stats(recon, edges);
    const double dq1 = std::abs(a.q1 - b.q1), dq2 = std::abs(a.q2 - b.q2), dq3 = std::abs(a.q3 - b.q3);
    j["phi4_stats"] = {{"dq1", dq1}, {"dq2", dq2}, {"dq3", dq3}, {"max", std::max({dq1, dq2, dq3})}};
  }
  if (kind == QoiKind::temperature) {
    const double ta = temperature(original, temp).group, tb = temperature(recon, temp).group;
    j["temperature"] = {{"original_k", ta}, {"reconstructed_k", tb}, {"abs_error_k", std::abs(ta - tb)}};
  }
  if (original.kind() == SampleKind::spin && original.dim() <= 20) {
    j["tv_distance"] = tv_distance(spin_histogram(original), spin_histogram(recon));
  }
  return j;
}

}  // namespace srs
