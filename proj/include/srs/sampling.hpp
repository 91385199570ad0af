#pragma once

// MCMC engines, exact enumeration oracles for small Ising models, synthetic
// data generators and the warm-started QoI correction loop.
//
// Everything that runs many chains splits them into a fixed number of
// blocks, each with its own generator derived from (seed, block). Results are
// therefore identical for any thread count.

#include <cstdint>
#include <functional>
#include <boost/random/mersenne_twister.hpp>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srs/lattice.hpp"
#include "srs/model.hpp"
#include "srs/qoi.hpp"
#include "srs/sample_set.hpp"

namespace srs {

using Rng = boost::random::mt19937_64;

/// Independent stream `stream` of the generator family selected by `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double standard_normal(Rng& rng);
void fill_normal(Rng& rng, std::span<double> out);

/// Number of chain blocks used by every parallel sampler.
inline constexpr std::size_t kChainBlocks = 64;

// ---- single-chain moves ----------------------------------------------------

/// Resamples site i from its heat-bath conditional.
void glauber_update(const IsingModel& m, std::span<double> sigma, std::size_t i, Rng& rng);

/// N updates at uniformly random sites.
void glauber_sweep(const IsingModel& m, std::span<double> sigma, Rng& rng);

/// x <- x + eps * score(x) + sqrt(2 eps) * z with z drawn from rng.
void langevin_step(const ModelDescriptor& m, std::span<double> x, double eps, Rng& rng);

/// Same step with caller-supplied noise z.
void langevin_step(const ModelDescriptor& m, std::span<double> x, double eps, std::span<const double> z);

// ---- exact oracles ---------------------------------------------------------

/// Boltzmann probabilities exp(E(s)) / Z over all 2^N states. Bit i of the
/// state index is set when spin i is +1. N <= 24.
std::vector<double> exact_ising_distribution(const IsingModel& m);

/// Spin vector of a state index.
std::vector<double> spin_state(std::uint64_t index, std::size_t n);

/// M i.i.d. draws by inverse CDF; table.size() must be 2^n.
SampleSet sample_exact(std::span<const double> table, std::size_t n, std::size_t m, std::uint64_t seed);

/// Pushes a distribution over states through one random-site Glauber update.
std::vector<double> apply_glauber_transition(const IsingModel& m, std::span<const double> table);

// ---- generators ------------------------------------------------------------

/// Nearest-neighbour lattice Ising model, couplings uniform on
/// [-coupling_max, coupling_max], zero fields.
IsingModel random_lattice_ising(std::span<const std::size_t> shape, Boundary boundary,
                                double coupling_max, Rng& rng);

/// M draws of mu + L z with L the Cholesky factor of sigma.
SampleSet generate_gaussian(const Vector& mu, const Matrix& sigma, std::size_t m, std::uint64_t seed);

/// Sigma = C C^T with C uniform on [-0.5, 0.5]; redrawn until cond <= max_cond.
Matrix random_covariance(std::size_t n, double max_cond, Rng& rng);

/// Q D Q^T with Q Haar-orthogonal (QR of a Gaussian matrix) and D uniform on [1/kappa, 1].
Matrix well_conditioned_covariance(std::size_t n, double kappa, Rng& rng);

/// M independent Langevin chains from standard normal starts, n_steps each at eps = dt.
SampleSet generate_phi4(const Phi4Model& m, std::size_t n_steps, double dt, std::size_t count,
                        std::uint64_t seed, std::vector<std::size_t> shape = {});

/// Each output row concatenates one independent uniformly drawn row of every input.
SampleSet concat_datasets(std::span<const SampleSet> sets, std::size_t m, std::uint64_t seed);

/// Velocities of `atoms_per_row * M` atoms drawn from Maxwell-Boltzmann at
/// `kelvin`, stored in units of spec.velocity_unit. With `thermostat`, the
/// centre-of-mass motion of the whole group is removed and the velocities are
/// rescaled so the group temperature is exactly `kelvin`.
SampleSet maxwell_boltzmann(std::size_t m, std::size_t atoms_per_row, double kelvin,
                            const TemperatureSpec& spec, std::uint64_t seed, bool thermostat = true);

/// Thermal velocity sqrt(k_B T / m) of the first mass in spec, in m/s.
double thermal_velocity(const TemperatureSpec& spec, double kelvin);

// ---- correction ------------------------------------------------------------

struct CorrectionOptions {
  double tolerance = 0.05;
  std::size_t max_sweeps = 1000;
  std::size_t check_every = 1;
  double langevin_step = 0.05;
};

struct TracePoint {
  std::size_t sweep = 0;
  double error = 0;
  double wall_time = 0;  ///< seconds since the start of correction
};

struct CorrectionReport {
  std::size_t sweeps_used = 0;
  std::vector<TracePoint> trace;
  bool converged = false;
  double wall_time = 0;
  /// Largest increase of the error between consecutive checkpoints once the
  /// error was within twice the tolerance.
  double max_regression = 0;

  std::string to_json() const;
  std::string to_csv() const;
  /// Sweeps to the first checkpoint at or below `tolerance`, or -1.
  long long sweeps_to(double tolerance) const;
};

/// Error of a candidate ensemble; lower is better.
using ErrorMetric = std::function<double(const SampleSet&)>;

struct CorrectionResult {
  SampleSet samples;
  CorrectionReport report;
};

/// Runs one chain per row under m until the QoI error against target is at
/// most opts.tolerance.
CorrectionResult correct(const SampleSet& init, const ModelDescriptor& m, const QoIRecord& target,
                         const CorrectionOptions& opts, std::uint64_t seed);

/// Same loop with an arbitrary ensemble metric (e.g. TV distance).
CorrectionResult correct(const SampleSet& init, const ModelDescriptor& m, const ErrorMetric& metric,
                         const CorrectionOptions& opts, std::uint64_t seed);

/// Uniform +-1 spins or standard normal vectors shaped like `like`.
SampleSet random_init(const SampleSet& like, std::uint64_t seed);

}  // namespace srs
