#pragma once

// Parameter estimation: interaction screening (GRISE) for spin data and
// score matching for the continuous families.

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "srs/lattice.hpp"
#include "srs/model.hpp"
#include "srs/sample_set.hpp"

namespace srs {

struct GriseOptions {
  double step_size = 0.25;
  double improvement_tolerance = 1e-6;  ///< stop once the objective drops by less than this
  std::size_t max_iterations = 50000;
  double l1_lambda = 0.0;
  double coupling_threshold = 0.0;
};

struct GriseNodeReport {
  std::size_t iterations = 0;
  double loss = 0;  ///< final objective, including the l1 term
  bool converged = false;
};

struct GriseResult {
  IsingModel model;
  std::vector<GriseNodeReport> nodes;
  bool converged = false;  ///< every node converged
  double wall_time = 0;
};

/// Interaction screening objective of node i. j_row has N entries; entry i is
/// ignored.
double iso_loss(const SampleSet& samples, std::size_t i, std::span<const double> j_row, double h_i);

GriseResult grise_fit(const SampleSet& samples, const GriseOptions& opts = {});

/// Same estimator on a weighted list of spin configurations, e.g. an exact
/// distribution. weights must be non-negative with a positive sum.
GriseResult grise_fit(const SampleSet& states, std::span<const double> weights,
                      const GriseOptions& opts = {});

struct ScoreMatchOptions {
  double step_size = 0.05;
  std::size_t iterations = 1000;     ///< minimum number of descent steps
  double tolerance = 1e-5;           ///< stop once max |C theta - I| is below this
  std::size_t max_iterations = 1000000;
};

struct GaussianFit {
  GaussianModel model;
  std::size_t iterations = 0;
  double residual = 0;  ///< max |C theta - I|
  bool converged = false;
  double wall_time = 0;
};

/// J(theta) = tr(theta^T theta C) / 2 - tr(theta)
double gaussian_sm_objective(const Matrix& theta, const Matrix& cov);

/// Symmetrised gradient (C theta - I + theta C - I) / 2.
Matrix gaussian_sm_gradient(const Matrix& theta, const Matrix& cov);

/// Gradient descent on J from theta = I for a given covariance.
GaussianFit score_matching_gaussian(const Matrix& cov, const ScoreMatchOptions& opts = {});

/// Mean and covariance from the data, then the covariance overload.
GaussianFit score_matching_gaussian(const SampleSet& samples, const ScoreMatchOptions& opts = {});

/// The empirical Phi^4 score matching objective is quadratic in
/// theta = (alpha, beta, gamma): J(theta) = b . theta + theta^T A theta / 2.
struct Phi4ScoreSystem {
  Eigen::Matrix3d a;
  Eigen::Vector3d b;

  double objective(const Eigen::Vector3d& theta) const { return b.dot(theta) + 0.5 * theta.dot(a * theta); }
  Eigen::Vector3d gradient(const Eigen::Vector3d& theta) const { return b + a * theta; }
};

Phi4ScoreSystem phi4_score_system(const SampleSet& samples, std::span<const Edge> edges);

/// Closed-form minimiser of the Phi^4 objective. opts is accepted for
/// interface symmetry; no iteration is needed.
Phi4Model score_matching_polynomial(const SampleSet& samples, std::span<const Edge> edges,
                                    const ScoreMatchOptions& opts = {});

}  // namespace srs
