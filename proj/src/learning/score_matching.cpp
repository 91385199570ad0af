#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <string>

#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/learning.hpp"
#include "srs/parallel.hpp"
#include "srs/qoi.hpp"

namespace srs {

double gaussian_sm_objective(const Matrix& theta, const Matrix& cov) {
  return 0.5 * (theta.transpose() * theta * cov).trace() - theta.trace();
}

Matrix gaussian_sm_gradient(const Matrix& theta, const Matrix& cov) {
  const Matrix eye = Matrix::Identity(theta.rows(), theta.cols());
  return 0.5 * ((cov * theta - eye) + (theta * cov - eye));
}

GaussianFit score_matching_gaussian(const Matrix& cov, const ScoreMatchOptions& opts) {
  require(cov.rows() == cov.cols() && cov.rows() >= 1, "covariance must be square");
  require(opts.step_size > 0.0, "score matching step size must be positive");
  require(opts.iterations >= 1, "score matching needs at least one iteration");
  require(opts.tolerance > 0.0, "score matching tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();

  // From theta = I every iterate is a polynomial in C, so the descent
  // decouples along the eigenvectors of C: theta_k <- theta_k - eta (l_k theta_k - 1).
  // This is the same iteration as the dense update, at O(N) per step.
  const Matrix sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) fail(ErrorKind::numerical, "eigendecomposition of C failed");
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff(), lmin = lambda.minCoeff();
  if (!(lmax > 0.0) || lmin <= lmax * 1e-8) {
    fail(ErrorKind::numerical,
         "covariance is singular or condition number exceeds 1e8; regularise the data "
         "(add a small ridge to C or drop constant components)");
  }
  if (std::abs(1.0 - opts.step_size * lmax) >= 1.0) {
    fail(ErrorKind::numerical, "score matching step size " + std::to_string(opts.step_size) +
                                   " diverges for largest covariance eigenvalue " + std::to_string(lmax) +
                                   "; rescale the data or reduce the step");
  }

  Vector t = Vector::Ones(lambda.size());
  std::size_t it = 0;
  double residual = 0.0;
  while (true) {
    t.array() -= opts.step_size * (lambda.array() * t.array() - 1.0);
    ++it;
    residual = (lambda.array() * t.array() - 1.0).abs().maxCoeff();
    if (it >= opts.iterations && residual <= opts.tolerance) break;
    if (it >= opts.max_iterations) break;
  }

  const Matrix& v = eig.eigenvectors();
  Matrix theta = v * t.asDiagonal() * v.transpose();
  theta = (0.5 * (theta + theta.transpose())).eval();

  GaussianFit fit;
  fit.iterations = it;
  const Matrix eye = Matrix::Identity(cov.rows(), cov.cols());
  fit.residual = (cov * theta - eye).cwiseAbs().maxCoeff();
  fit.converged = fit.residual <= opts.tolerance;
  fit.model = GaussianModel(Vector::Zero(cov.rows()), std::move(theta));
  fit.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

GaussianFit score_matching_gaussian(const SampleSet& samples, const ScoreMatchOptions& opts) {
  require(samples.kind() == SampleKind::continuous, "score matching needs continuous samples");
  const auto start = std::chrono::steady_clock::now();
  const Moments mom = moments12(samples);
  GaussianFit fit = score_matching_gaussian(mom.m2, opts);
  fit.model = GaussianModel(mom.m1, fit.model.precision());
  fit.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

// With psi_i = theta . F_i, F_i = (-4 x^3, -2 x, -s_i) and
// d psi_i / d x_i = theta . (-12 x^2, -2, 0) (no self edges, so s_i does not
// depend on x_i), the Hyvarinen objective is
//   J = b . theta + theta^T A theta / 2,  A = <sum_i F_i F_i^T>,
//   b = <sum_i (-12 x_i^2, -2, 0)>.
Phi4ScoreSystem phi4_score_system(const SampleSet& samples, std::span<const Edge> edges) {
  require(samples.kind() == SampleKind::continuous, "score matching needs continuous samples");
  validate_edges(samples.dim(), edges);
  const Adjacency adj(samples.dim(), edges);
  const std::size_t m = samples.size(), n = samples.dim();
  constexpr std::size_t kBlocks = 8;
  const std::size_t blocks = std::min(kBlocks, m);
  std::vector<kernels::Phi4Sums> partial(blocks);
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> nbr(n);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      adj.neighbour_sums(samples.row(i), nbr);
      k.phi4_sums(samples.row(i).data(), nbr.data(), n, &partial[b]);
    }
  });
  kernels::Phi4Sums t;
  for (const auto& p : partial) {
    t.x2 += p.x2;
    t.x4 += p.x4;
    t.x6 += p.x6;
    t.x3s += p.x3s;
    t.xs += p.xs;
    t.s2 += p.s2;
  }
  const double md = static_cast<double>(m);
  Phi4ScoreSystem sys;
  sys.a << 16.0 * t.x6, 8.0 * t.x4, 4.0 * t.x3s,
           8.0 * t.x4, 4.0 * t.x2, 2.0 * t.xs,
           4.0 * t.x3s, 2.0 * t.xs, t.s2;
  sys.a /= md;
  sys.b << -12.0 * t.x2 / md, -2.0 * static_cast<double>(n), 0.0;
  return sys;
}

Phi4Model score_matching_polynomial(const SampleSet& samples, std::span<const Edge> edges,
                                    const ScoreMatchOptions&) {
  const Phi4ScoreSystem sys = phi4_score_system(samples, edges);
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(sys.a);
  const double scale = sys.a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || lu.rank() < 3 || std::abs(lu.determinant()) <= 1e-12 * scale * scale * scale) {
    fail(ErrorKind::numerical, "degenerate score matching system: data have no usable variance");
  }
  const Eigen::Vector3d theta = lu.solve(-sys.b);
  return Phi4Model(samples.dim(), theta(0), theta(1), theta(2),
                   std::vector<Edge>(edges.begin(), edges.end()));
}

}  // namespace srs
