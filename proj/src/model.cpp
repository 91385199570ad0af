#include "srs/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "srs/error.hpp"
#include "srs/kernels.hpp"

namespace srs {

std::string_view to_string(QoiKind kind) {
  switch (kind) {
    case QoiKind::moments12: return "moments12";
    case QoiKind::phi4_stats: return "phi4_stats";
    case QoiKind::temperature: return "temperature";
  }
  return "unknown";
}

QoiKind qoi_kind_from_string(std::string_view s) {
  if (s == "moments12") return QoiKind::moments12;
  if (s == "phi4_stats") return QoiKind::phi4_stats;
  if (s == "temperature") return QoiKind::temperature;
  fail(ErrorKind::invalid_argument, "unknown QoI kind '" + std::string(s) + "'");
}

IsingModel::IsingModel(Matrix couplings, Vector fields)
    : couplings_(std::move(couplings)), fields_(std::move(fields)) {
  const auto n = fields_.size();
  require(n >= 1, "Ising model needs at least one spin");
  require(couplings_.rows() == n && couplings_.cols() == n, "coupling matrix must be N x N");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(couplings_(i, i) == 0.0, "coupling matrix must have a zero diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      require(couplings_(i, j) == couplings_(j, i), "coupling matrix must be symmetric");
    }
  }
}

IsingModel::IsingModel(std::size_t n)
    : IsingModel(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                 Vector::Zero(static_cast<Eigen::Index>(n))) {}

GaussianModel::GaussianModel(Vector mean, Matrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  const auto n = mean_.size();
  require(n >= 1, "Gaussian model needs at least one dimension");
  require(precision_.rows() == n && precision_.cols() == n, "precision matrix must be N x N");
  require(precision_ == precision_.transpose(), "precision matrix must be symmetric");
  Eigen::LLT<Matrix> llt(precision_);
  require(llt.info() == Eigen::Success, "precision matrix must be positive definite");
}

Phi4Model::Phi4Model(std::size_t n, double alpha, double beta, double gamma,
                     std::vector<Edge> edges)
    : n_(n), alpha_(alpha), beta_(beta), gamma_(gamma), edges_(std::move(edges)) {
  require(n >= 1, "Phi4 model needs at least one site");
  validate_edges(n, edges_);
  adjacency_ = Adjacency(n, edges_);
}

ModelDescriptor::ModelDescriptor(GaussianModel m, QoiKind kind) : model(std::move(m)), qoi_kind(kind) {
  require(kind == QoiKind::moments12 || kind == QoiKind::temperature,
          "Gaussian models conserve moments or temperature");
}

std::size_t ModelDescriptor::dim() const {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

std::string_view ModelDescriptor::variant_name() const {
  switch (model.index()) {
    case 0: return "ising";
    case 1: return "gaussian";
    default: return "phi4";
  }
}

namespace {

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    fail(ErrorKind::invalid_argument, "dimension mismatch: model has " + std::to_string(expected) +
                                          " variables, input has " + std::to_string(got));
  }
}

void check_spins(std::span<const double> sigma) {
  for (double s : sigma) require(s == 1.0 || s == -1.0, "spin entries must be +-1");
}

}  // namespace

double ising_energy(const IsingModel& m, std::span<const double> sigma) {
  check_dim(m.dim(), sigma.size());
  check_spins(sigma);
  const std::size_t n = m.dim();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Upper triangle only: each pair once.
    const auto row = m.coupling_row(i);
    e += sigma[i] * (m.field(i) + kernels::dot(row.subspan(i + 1), sigma.subspan(i + 1)));
  }
  return e;
}

double log_density_unnormalized(const ModelDescriptor& md, std::span<const double> x) {
  check_dim(md.dim(), x.size());
  if (const auto* ising = std::get_if<IsingModel>(&md.model)) return ising_energy(*ising, x);

  if (const auto* g = std::get_if<GaussianModel>(&md.model)) {
    const Eigen::Map<const Vector> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return v.dot(g->quadratic() * v) + g->linear().dot(v);
  }

  const auto& p = std::get<Phi4Model>(md.model);
  double s2 = 0.0, s4 = 0.0, pair = 0.0;
  for (double xi : x) {
    s2 += xi * xi;
    s4 += xi * xi * xi * xi;
  }
  for (const Edge& e : p.edges()) pair += x[e.a] * x[e.b];
  return -p.alpha() * s4 - p.beta() * s2 - p.gamma() * pair;
}

void score(const ModelDescriptor& md, std::span<const double> x, std::span<double> out) {
  require(md.is_continuous(), "score is defined for continuous models only");
  check_dim(md.dim(), x.size());
  check_dim(md.dim(), out.size());
  const auto& k = kernels::active();

  if (const auto* g = std::get_if<GaussianModel>(&md.model)) {
    const std::size_t n = g->dim();
    std::vector<double> centred(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) centred[i] -= g->mean()(static_cast<Eigen::Index>(i));
    k.gemv(g->precision().data(), n, n, centred.data(), out.data());
    for (double& v : out) v = -v;
    return;
  }

  const auto& p = std::get<Phi4Model>(md.model);
  std::vector<double> nbr(p.dim());
  p.adjacency().neighbour_sums(x, nbr);
  k.phi4_drift(x.data(), nbr.data(), p.alpha(), p.beta(), p.gamma(), out.data(), p.dim());
}

std::vector<double> score(const ModelDescriptor& m, std::span<const double> x) {
  std::vector<double> out(x.size());
  score(m, x, out);
  return out;
}

double local_field(const IsingModel& m, std::span<const double> sigma, std::size_t i) {
  // J_ii = 0, so the full row dot product already excludes j = i.
  return m.field(i) + kernels::dot(m.coupling_row(i), sigma);
}

double glauber_conditional(const IsingModel& m, std::span<const double> sigma, std::size_t i) {
  check_dim(m.dim(), sigma.size());
  require(i < m.dim(), "site index out of range");
  check_spins(sigma);
  // exp(2f) / (1 + exp(2f)) written in the overflow-safe logistic form.
  return 1.0 / (1.0 + std::exp(-2.0 * local_field(m, sigma, i)));
}

}  // namespace srs
