#pragma once

// Quantities of interest (QoIs), the errors used to decide when a
// reconstruction is good enough, and distribution-level diagnostics.

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "srs/lattice.hpp"
#include "srs/model.hpp"
#include "srs/sample_set.hpp"

namespace srs {

/// First moment and Bessel-corrected second central moment.
struct Moments {
  Vector m1;
  Matrix m2;
};

struct Phi4Stats {
  double q1 = 0;  ///< edge average of x_i x_j
  double q2 = 0;  ///< site average of x^2
  double q3 = 0;  ///< site average of x^4
};

/// Constants needed to turn stored velocities into a kinetic temperature.
/// Each sample row holds the velocity components of N / n_dim atoms.
struct TemperatureSpec {
  std::vector<double> masses{26.982e-3 / 6.022e23};  ///< kg; one per atom in a row, or one for all
  int n_dim = 3;
  int n_fix_dofs = 0;
  double boltzmann = 1.38e-23;   ///< J/K
  double velocity_unit = 1.0;    ///< m/s per stored velocity unit
};

struct TemperatureTarget {
  double kelvin = 0;
  TemperatureSpec spec;
};

struct QoIRecord {
  std::variant<Moments, Phi4Stats, TemperatureTarget> payload;
  double tolerance = 0.05;

  QoiKind kind() const;
};

Moments moments12(const SampleSet& s);

/// Reference two-pass, per-entry accumulation (no kernels). Used by tests and
/// by the evaluate command for small inputs.
Moments moments12_naive(const SampleSet& s);

struct MomentError {
  double e1 = 0;  ///< max |m1 - m1'|
  double e2 = 0;  ///< max |m2 - m2'| elementwise
  double max() const { return e1 > e2 ? e1 : e2; }
};

MomentError moment_error(const Moments& target, const Moments& recon);
double moment_error(const QoIRecord& target, const SampleSet& recon);

Phi4Stats phi4_stats(const SampleSet& s, std::span<const Edge> edges);

struct TemperatureResult {
  std::vector<double> per_row;  ///< empty when a single row has no free DOF
  double group = 0;             ///< all rows treated as one group of atoms
};

TemperatureResult temperature(const SampleSet& velocities, const TemperatureSpec& spec);

/// Builds a QoI record from the data the archive will be built from.
QoIRecord compute_qoi(QoiKind kind, const SampleSet& s, std::span<const Edge> edges,
                      const TemperatureSpec& temp, double tolerance);

/// Family error: max moment error, max |dq|, or |dT|.
double qoi_error(const QoIRecord& target, const SampleSet& recon, std::span<const Edge> edges);

/// (state index, count); bit i of the index is set when spin i is +1.
using Histogram = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

std::uint64_t spin_state_index(std::span<const double> sigma);
Histogram spin_histogram(const SampleSet& s);

/// Half the L1 distance between two normalised distributions.
double tv_distance(const Histogram& p, const Histogram& q);
double tv_distance(const Histogram& p, std::span<const double> table);
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace srs
