#pragma once

// Exponential-family models used for learning and correction, and the pure
// evaluation routines (energy, score, single-site conditional) shared by the
// other modules. All model objects are immutable after construction.

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "srs/lattice.hpp"
#include "srs/sample_set.hpp"

namespace srs {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Which family of quantities of interest a model is meant to conserve.
enum class QoiKind { moments12, phi4_stats, temperature };

std::string_view to_string(QoiKind kind);
QoiKind qoi_kind_from_string(std::string_view s);

/// Pairwise +-1 model, E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j.
class IsingModel {
 public:
  IsingModel() = default;
  /// couplings must be symmetric with a zero diagonal.
  IsingModel(Matrix couplings, Vector fields);
  explicit IsingModel(std::size_t n);

  std::size_t dim() const { return static_cast<std::size_t>(fields_.size()); }
  const Matrix& couplings() const { return couplings_; }
  const Vector& fields() const { return fields_; }
  double coupling(std::size_t i, std::size_t j) const { return couplings_(i, j); }
  double field(std::size_t i) const { return fields_(i); }
  std::span<const double> coupling_row(std::size_t i) const {
    return {couplings_.data() + i * dim(), dim()};
  }

 private:
  Matrix couplings_;
  Vector fields_;
};

/// Multivariate normal in precision form. As an energy: x^T A x + b^T x with
/// A = -theta/2 and b = theta mu.
class GaussianModel {
 public:
  GaussianModel() = default;
  /// precision must be symmetric positive definite.
  GaussianModel(Vector mean, Matrix precision);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& precision() const { return precision_; }
  Matrix quadratic() const { return -0.5 * precision_; }
  Vector linear() const { return precision_ * mean_; }

 private:
  Vector mean_;
  Matrix precision_;
};

/// Lattice scalar field, log p(x) = -alpha sum x^4 - beta sum x^2 - gamma sum_E x_i x_j + const.
class Phi4Model {
 public:
  Phi4Model() = default;
  Phi4Model(std::size_t n, double alpha, double beta, double gamma, std::vector<Edge> edges);

  std::size_t dim() const { return n_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Adjacency& adjacency() const { return adjacency_; }

 private:
  std::size_t n_ = 0;
  double alpha_ = 0, beta_ = 0, gamma_ = 0;
  std::vector<Edge> edges_;
  Adjacency adjacency_;
};

/// The learned compact representation plus the QoI family it conserves.
struct ModelDescriptor {
  std::variant<IsingModel, GaussianModel, Phi4Model> model;
  QoiKind qoi_kind = QoiKind::moments12;

  ModelDescriptor() = default;
  ModelDescriptor(IsingModel m) : model(std::move(m)), qoi_kind(QoiKind::moments12) {}
  ModelDescriptor(GaussianModel m, QoiKind kind = QoiKind::moments12);
  ModelDescriptor(Phi4Model m) : model(std::move(m)), qoi_kind(QoiKind::phi4_stats) {}

  std::size_t dim() const;
  bool is_ising() const { return std::holds_alternative<IsingModel>(model); }
  bool is_continuous() const { return !is_ising(); }
  std::string_view variant_name() const;
};

double ising_energy(const IsingModel& m, std::span<const double> sigma);

/// Energy E(x) = log p(x) + log Z for any variant.
double log_density_unnormalized(const ModelDescriptor& m, std::span<const double> x);

/// grad_x log p(x) for the continuous variants, written into out.
void score(const ModelDescriptor& m, std::span<const double> x, std::span<double> out);
std::vector<double> score(const ModelDescriptor& m, std::span<const double> x);

/// Local field h_i + sum_{j != i} J_ij sigma_j.
double local_field(const IsingModel& m, std::span<const double> sigma, std::size_t i);

/// P(sigma_i = +1 | rest) under heat-bath (Glauber) dynamics.
double glauber_conditional(const IsingModel& m, std::span<const double> sigma, std::size_t i);

}  // namespace srs
