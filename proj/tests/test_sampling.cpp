#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

#include "srs/codec.hpp"
#include "srs/error.hpp"
#include "srs/lattice.hpp"
#include "srs/sampling.hpp"
#include "support.hpp"

using namespace srs;

namespace {

IsingModel pair_model(double j) {
  Matrix c(2, 2);
  c << 0, j, j, 0;
  return IsingModel(c, Vector::Zero(2));
}

std::vector<double> histogram_of(const SampleSet& s) {
  std::vector<double> h(std::size_t{1} << s.dim(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) h[spin_state_index(s.row(i))] += 1.0;
  return h;
}

// Composite trapezoid on [-8, 8]; the integrands decay like exp(-alpha x^4).
double phi4_site_moment(double alpha, double beta, int power) {
  const int steps = 200000;
  const double lo = -8.0, h = 16.0 / steps;
  double num = 0, den = 0;
  for (int k = 0; k <= steps; ++k) {
    const double x = lo + k * h;
    const double w = (k == 0 || k == steps ? 0.5 : 1.0) * std::exp(-alpha * std::pow(x, 4) - beta * x * x);
    num += w * std::pow(x, power);
    den += w;
  }
  return num / den;
}

struct Lattice16 {
  IsingModel model;
  SampleSet data;
};

Lattice16 lattice16(std::uint64_t seed, std::size_t m) {
  const std::vector<std::size_t> shape{4, 4};
  Rng rng = make_rng(seed, 99);
  IsingModel model = random_lattice_ising(shape, Boundary::open, 0.4, rng);
  const auto table = exact_ising_distribution(model);
  return {std::move(model), sample_exact(table, 16, m, seed)};
}

SampleSet warm_init(const Lattice16& l, double compression, const QoIRecord& target) {
  const ModelDescriptor md(l.model);
  return decompress_set(compress_set(l.data, 1.0 - compression, md, target));
}

}  // namespace

TEST_CASE("Glauber with zero couplings leaves site means at zero") {
  const std::size_t n = 4, sweeps = 100000;
  const IsingModel m(n);
  Rng rng = make_rng(5);
  std::vector<double> sigma(n, 1.0), sum(n, 0.0);
  for (std::size_t t = 0; t < sweeps; ++t) {
    glauber_sweep(m, sigma, rng);
    for (std::size_t i = 0; i < n; ++i) sum[i] += sigma[i];
  }
  // A site keeps its value over a sweep with probability (1 - 1/N)^N.
  const double rho = std::pow(1.0 - 1.0 / n, static_cast<double>(n));
  const double sd = std::sqrt((1 + rho) / (1 - rho) / sweeps);
  for (double s : sum) CHECK(std::abs(s / sweeps) <= 3 * sd);
}

TEST_CASE("Glauber on two coupled spins reaches the exact Gibbs table") {
  const IsingModel m = pair_model(1.0);
  // Each pair enters the energy once: P(aligned) = e / (2e + 2/e) per state.
  const double e1 = std::exp(1.0), em1 = std::exp(-1.0), z = 2 * e1 + 2 * em1;
  const std::vector<double> exact{e1 / z, em1 / z, em1 / z, e1 / z};
  Rng rng = make_rng(6);
  std::vector<double> sigma{1.0, -1.0}, counts(4, 0.0);
  for (int t = 0; t < 1000; ++t) glauber_sweep(m, sigma, rng);
  for (int t = 0; t < 1000000; ++t) {
    glauber_sweep(m, sigma, rng);
    counts[spin_state_index(sigma)] += 1.0;
  }
  CHECK(tv_distance(counts, exact) <= 0.01);
}

TEST_CASE("Glauber replays exactly from a seed") {
  const IsingModel m = test::random_ising(8, 3);
  std::vector<double> a(8, 1.0), b(8, 1.0);
  Rng ra = make_rng(77), rb = make_rng(77);
  for (int t = 0; t < 500; ++t) {
    glauber_sweep(m, a, ra);
    glauber_sweep(m, b, rb);
    REQUIRE(a == b);
  }
}

TEST_CASE("langevin_step examples") {
  const ModelDescriptor std_normal(GaussianModel(Vector::Zero(1), Matrix::Identity(1, 1)));
  std::vector<double> x{1.0};
  const std::vector<double> z{0.0};
  langevin_step(std_normal, x, 0.5, z);
  CHECK(x[0] == doctest::Approx(0.5));

  std::vector<double> y{0.3, -0.2};
  const ModelDescriptor g2(GaussianModel(Vector::Zero(2), Matrix::Identity(2, 2)));
  Rng rng = make_rng(1);
  langevin_step(g2, y, 0.0, rng);
  CHECK(y == std::vector<double>{0.3, -0.2});

  std::vector<double> w{0.0, 0.0};
  const std::vector<double> z2{1.0, -2.0};
  langevin_step(g2, w, 0.02, z2);
  CHECK(w[0] == doctest::Approx(std::sqrt(0.04)));
  CHECK(w[1] == doctest::Approx(-2 * std::sqrt(0.04)));

  std::vector<double> s{1.0, 1.0};
  CHECK_THROWS_AS(langevin_step(ModelDescriptor(pair_model(0.1)), s, 0.1, rng), Error);
}

TEST_CASE("a long Langevin chain reproduces the Gaussian covariance") {
  Matrix sigma(2, 2);
  sigma << 1.0, 0.5, 0.5, 1.0;
  const Matrix theta = sigma.inverse();
  const ModelDescriptor m(GaussianModel(Vector::Zero(2), (0.5 * (theta + theta.transpose())).eval()));
  Rng rng = make_rng(8);
  std::vector<double> x{0.0, 0.0};
  double s00 = 0, s01 = 0, s11 = 0, m0 = 0, m1 = 0;
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    langevin_step(m, x, 0.01, rng);
    m0 += x[0];
    m1 += x[1];
    s00 += x[0] * x[0];
    s01 += x[0] * x[1];
    s11 += x[1] * x[1];
  }
  m0 /= steps;
  m1 /= steps;
  CHECK(std::abs(s00 / steps - m0 * m0 - 1.0) <= 0.05);
  CHECK(std::abs(s11 / steps - m1 * m1 - 1.0) <= 0.05);
  CHECK(std::abs(s01 / steps - m0 * m1 - 0.5) <= 0.05 * 0.5);
}

TEST_CASE("exact_ising_distribution examples") {
  for (double p : exact_ising_distribution(IsingModel(2))) CHECK(p == doctest::Approx(0.25));

  const double beta = 0.7;
  const auto t = exact_ising_distribution(pair_model(beta));
  const double z = 2 * std::exp(beta) + 2 * std::exp(-beta);
  CHECK(t[0] == doctest::Approx(std::exp(beta) / z));
  CHECK(t[3] == doctest::Approx(std::exp(beta) / z));
  CHECK(t[1] == doctest::Approx(std::exp(-beta) / z));
  CHECK(t[2] == doctest::Approx(std::exp(-beta) / z));

  const IsingModel r = test::random_ising(10, 4);
  const IsingModel zero_field(r.couplings(), Vector::Zero(10));
  const auto big = exact_ising_distribution(zero_field);
  CHECK(std::accumulate(big.begin(), big.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const std::size_t mask = (std::size_t{1} << 10) - 1;
  for (std::size_t s = 0; s <= mask; ++s) CHECK(big[s] == doctest::Approx(big[s ^ mask]).epsilon(1e-12));

  CHECK_THROWS_AS(exact_ising_distribution(IsingModel(25)), Error);
}

TEST_CASE("the exact table is stationary under one Glauber update") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const IsingModel m = test::random_ising(n, 100 * n + seed, 1.5);
      const auto table = exact_ising_distribution(m);
      const auto next = apply_glauber_transition(m, table);
      CHECK(tv_distance(table, next) <= 1e-12);
    }
  }
}

TEST_CASE("sample_exact") {
  std::vector<double> point(8, 0.0);
  point[5] = 1.0;
  const SampleSet c = sample_exact(point, 3, 100, 1);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(spin_state_index(c.row(i)) == 5);

  const IsingModel m = test::random_ising(3, 9, 0.8);
  const auto table = exact_ising_distribution(m);
  const std::size_t draws = 100000;
  const SampleSet s = sample_exact(table, 3, draws, 2);
  const auto h = histogram_of(s);
  for (std::size_t k = 0; k < 8; ++k) {
    const double sd = std::sqrt(table[k] * (1 - table[k]) / draws);
    CHECK(std::abs(h[k] / draws - table[k]) <= 3 * sd);
  }
  CHECK(sample_exact(table, 3, 1000, 7) == sample_exact(table, 3, 1000, 7));
  CHECK(!(sample_exact(table, 3, 1000, 7) == sample_exact(table, 3, 1000, 8)));
  CHECK_THROWS_AS(sample_exact(std::vector<double>(7, 0.1), 3, 10, 1), Error);
}

TEST_CASE("generate_gaussian") {
  const std::size_t n = 4, m = 100000;
  const SampleSet s = generate_gaussian(Vector::Zero(n), Matrix::Identity(n, n), m, 3);
  const Moments mo = moments12_naive(s);
  const double sd1 = 1 / std::sqrt(double(m)), sd_diag = std::sqrt(2.0 / m), sd_off = 1 / std::sqrt(double(m));
  for (Eigen::Index i = 0; i < Eigen::Index(n); ++i) {
    CHECK(std::abs(mo.m1(i)) <= 3 * sd1);
    for (Eigen::Index j = 0; j < Eigen::Index(n); ++j) {
      CHECK(std::abs(mo.m2(i, j) - (i == j ? 1.0 : 0.0)) <= 3 * (i == j ? sd_diag : sd_off));
    }
  }

  Matrix sigma(2, 2);
  sigma << 2.0, 0.3, 0.3, 1.0;
  Vector mu(2);
  mu << 1.5, -0.25;
  const SampleSet base = generate_gaussian(Vector::Zero(2), sigma, 500, 4);
  const SampleSet shifted = generate_gaussian(mu, sigma, 500, 4);
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(shifted(i, 0) == base(i, 0) + mu(0));
    CHECK(shifted(i, 1) == base(i, 1) + mu(1));
  }
  CHECK(generate_gaussian(mu, sigma, 500, 4) == shifted);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(generate_gaussian(Vector::Zero(2), indefinite, 5, 1), Error);
}

TEST_CASE("covariance generators") {
  Rng rng = make_rng(10);
  const Matrix eye = well_conditioned_covariance(12, 1.0, rng);
  CHECK((eye - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-12);

  for (double kappa : {2.0, 10.0, 100.0}) {
    const Matrix s = well_conditioned_covariance(30, kappa, rng);
    CHECK(s == s.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues();
    CHECK(ev.minCoeff() >= 1 / kappa - 1e-9);
    CHECK(ev.maxCoeff() <= 1 + 1e-9);
    CHECK(ev.maxCoeff() / ev.minCoeff() <= kappa * (1 + 1e-9));
  }

  for (int trial = 0; trial < 5; ++trial) {
    const Matrix s = random_covariance(16, 50.0, rng);
    CHECK(s == s.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues();
    CHECK(ev.minCoeff() > 0);
    CHECK(ev.maxCoeff() / ev.minCoeff() <= 50.0 * (1 + 1e-9));
  }
}

TEST_CASE("Phi4 sites decouple at zero coupling and match quadrature") {
  const double alpha = 0.5, beta = -0.4;
  const Phi4Model m(4, alpha, beta, 0.0, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}});
  const SampleSet s = generate_phi4(m, 4000, 0.005, 20000, 12);
  double x2 = 0, x4 = 0;
  for (double v : s.values()) {
    x2 += v * v;
    x4 += v * v * v * v;
  }
  x2 /= static_cast<double>(s.values().size());
  x4 /= static_cast<double>(s.values().size());
  const double q2 = phi4_site_moment(alpha, beta, 2), q4 = phi4_site_moment(alpha, beta, 4);
  CHECK(std::abs(x2 / q2 - 1) <= 0.02);
  CHECK(std::abs(x4 / q4 - 1) <= 0.02);
}

TEST_CASE("Phi4 generation is finite and deterministic over the parameter ranges") {
  const std::vector<std::size_t> shape{8, 8};
  const auto edges = lattice_edges(shape, Boundary::periodic);
  for (double alpha : {0.1, 0.12}) {
    for (double beta : {0.2, 0.22}) {
      for (double gamma : {0.3, 0.32}) {
        const Phi4Model m(64, alpha, beta, gamma, edges);
        const SampleSet s = generate_phi4(m, 2000, 0.001, 64, 13, shape);
        for (double v : s.values()) CHECK(std::isfinite(v));
        CHECK(s.shape() == shape);
      }
    }
  }
  const Phi4Model m(64, 0.11, 0.21, 0.31, edges);
  CHECK(generate_phi4(m, 100, 0.001, 10, 14, shape) == generate_phi4(m, 100, 0.001, 10, 14, shape));
  CHECK_THROWS_AS(generate_phi4(m, 10, 0.0, 10, 1), Error);
}

TEST_CASE("concat_datasets") {
  Matrix sa(2, 2), sb(2, 2);
  sa << 1.0, 0.6, 0.6, 1.0;
  sb << 2.0, -0.5, -0.5, 0.5;
  Vector mb(2);
  mb << 1.0, -1.0;
  const std::vector<SampleSet> sets{generate_gaussian(Vector::Zero(2), sa, 20000, 1),
                                    generate_gaussian(mb, sb, 20000, 2)};
  const std::size_t m = 100000;
  const SampleSet c = concat_datasets(sets, m, 3);
  REQUIRE(c.dim() == 4);
  REQUIRE(c.size() == m);

  const Moments all = moments12_naive(c);
  const Moments a = moments12_naive(sets[0]), b = moments12_naive(sets[1]);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double corr = all.m2(i, 2 + j) / std::sqrt(all.m2(i, i) * all.m2(2 + j, 2 + j));
      CHECK(std::abs(corr) <= 3 / std::sqrt(double(m)));
    }
  }
  // Rows are drawn with replacement, so block moments scatter around the source moments.
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(std::abs(all.m1(i) - a.m1(i)) <= 3 * std::sqrt(a.m2(i, i) / m));
    CHECK(std::abs(all.m1(2 + i) - b.m1(i)) <= 3 * std::sqrt(b.m2(i, i) / m));
    CHECK(std::abs(all.m2(i, i) / a.m2(i, i) - 1) <= 3 * std::sqrt(2.0 / m));
    CHECK(std::abs(all.m2(2 + i, 2 + i) / b.m2(i, i) - 1) <= 3 * std::sqrt(2.0 / m));
  }
  // Every block of every row is a row of its source.
  for (std::size_t r = 0; r < 50; ++r) {
    bool found = false;
    for (std::size_t k = 0; k < sets[1].size() && !found; ++k) {
      found = sets[1](k, 0) == c(r, 2) && sets[1](k, 1) == c(r, 3);
    }
    CHECK(found);
  }
  CHECK(concat_datasets(sets, 100, 3) == concat_datasets(sets, 100, 3));
  const std::vector<SampleSet> mixed{sets[0], test::random_spins(10, 2, 1)};
  CHECK_THROWS_AS(concat_datasets(mixed, 10, 1), Error);
}

TEST_CASE("Maxwell-Boltzmann generator hits its temperature") {
  const TemperatureSpec spec;
  const SampleSet v = maxwell_boltzmann(10000, 256, 300.0, spec, 5, false);
  CHECK(std::abs(temperature(v, spec).group - 300.0) <= 0.5);
  const SampleSet exact = maxwell_boltzmann(100, 3, 300.0, spec, 5, true);
  CHECK(temperature(exact, spec).group == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("correct exits immediately when the target is already met") {
  const Lattice16 l = lattice16(1, 5000);
  const QoIRecord target = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.05);
  const auto r = correct(l.data, ModelDescriptor(l.model), target, CorrectionOptions{}, 1);
  CHECK(r.report.converged);
  CHECK(r.report.sweeps_used == 0);
  CHECK(r.report.trace.size() == 1);
  CHECK(r.samples == l.data);
}

TEST_CASE("correct rejects mismatched inputs and reports divergence") {
  const Lattice16 l = lattice16(2, 100);
  const QoIRecord moments = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.05);
  QoIRecord phi;
  phi.payload = Phi4Stats{};
  CHECK_THROWS_AS(correct(l.data, ModelDescriptor(l.model), phi, CorrectionOptions{}, 1), Error);
  CHECK_THROWS_AS(correct(test::random_spins(10, 5, 1), ModelDescriptor(l.model), moments, CorrectionOptions{}, 1),
                  Error);
  const ModelDescriptor gauss(GaussianModel(Vector::Zero(16), Matrix::Identity(16, 16)));
  CHECK_THROWS_AS(correct(l.data, gauss, moments, CorrectionOptions{}, 1), Error);

  const ModelDescriptor stiff(GaussianModel(Vector::Zero(2), 100.0 * Matrix::Identity(2, 2)));
  const SampleSet x = test::random_continuous(20, 2, 3);
  CorrectionOptions opts;
  opts.tolerance = 1e-12;
  opts.max_sweeps = 50;
  opts.langevin_step = 1.0;
  try {
    const SampleSet far(SampleKind::continuous, 2, std::vector<double>{5, 5, 6, 4});
    correct(x, stiff, compute_qoi(QoiKind::moments12, far, {}, {}, 1e-12), opts, 1);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
  }
}

TEST_CASE("correct is deterministic and its report is consistent") {
  const Lattice16 l = lattice16(3, 20000);
  const QoIRecord target = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.02);
  const SampleSet init = random_init(l.data, 4);
  CorrectionOptions opts;
  opts.tolerance = 0.02;
  opts.max_sweeps = 12;
  opts.check_every = 2;
  const auto a = correct(init, ModelDescriptor(l.model), target, opts, 9);
  const auto b = correct(init, ModelDescriptor(l.model), target, opts, 9);
  CHECK(a.samples == b.samples);
  REQUIRE(a.report.trace.size() == b.report.trace.size());
  for (std::size_t k = 0; k < a.report.trace.size(); ++k) CHECK(a.report.trace[k].error == b.report.trace[k].error);

  const auto& rep = a.report;
  REQUIRE(!rep.trace.empty());
  CHECK(rep.trace.front().sweep == 0);
  for (std::size_t k = 1; k < rep.trace.size(); ++k) {
    CHECK(rep.trace[k].sweep > rep.trace[k - 1].sweep);
    CHECK(rep.trace[k].sweep % 2 == 0);
  }
  CHECK(rep.trace.back().sweep == rep.sweeps_used);
  CHECK(rep.sweeps_used <= opts.max_sweeps);
  if (rep.converged) CHECK(rep.trace.back().error <= opts.tolerance);
  CHECK(rep.to_csv().rfind("sweep,qoi_error,wall_time_s\n", 0) == 0);
  CHECK(rep.to_json().find("\"error_trace\"") != std::string::npos);
}

TEST_CASE("random_init draws the right alphabet") {
  const SampleSet spins = random_init(test::random_spins(1000, 8, 1), 2);
  double mean = 0;
  for (double v : spins.values()) {
    CHECK((v == 1.0 || v == -1.0));
    mean += v;
  }
  CHECK(std::abs(mean / 8000) <= 3 / std::sqrt(8000.0));
  const SampleSet normal = random_init(test::random_continuous(5000, 4, 1), 3);
  const Moments mo = moments12_naive(normal);
  CHECK(std::abs(mo.m2(0, 0) - 1.0) <= 3 * std::sqrt(2.0 / 5000));
  CHECK(random_init(normal, 3) == random_init(normal, 3));
}

TEST_CASE("warm-started correction of a 16-spin archive at C = 0.9 converges within 15 sweeps") {
  const Lattice16 l = lattice16(4, 100000);
  const QoIRecord target = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.05);
  CorrectionOptions opts;
  opts.max_sweeps = 15;
  const auto r = correct(warm_init(l, 0.9, target), ModelDescriptor(l.model), target, opts, 5);
  CHECK(r.report.converged);
  CHECK(r.report.sweeps_used <= 15);
}

TEST_CASE("regressions near the tolerance stay within the Monte-Carlo noise floor") {
  const std::size_t m = 10000;
  const Lattice16 l = lattice16(5, m);
  const auto table = exact_ising_distribution(l.model);
  const QoIRecord target = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.05);

  // Spread of the metric over independent exact ensembles of the same size.
  std::vector<double> errs;
  for (std::uint64_t k = 0; k < 30; ++k) errs.push_back(moment_error(target, sample_exact(table, 16, m, 1000 + k)));
  const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
  double var = 0;
  for (double e : errs) var += (e - mean) * (e - mean);
  const double sd = std::sqrt(var / (errs.size() - 1));

  // A tolerance just below the floor keeps the loop running while tracked.
  CorrectionOptions opts;
  opts.tolerance = 0.6 * mean;
  opts.max_sweeps = 40;
  const auto r = correct(random_init(l.data, 6), ModelDescriptor(l.model), target, opts, 7);
  CAPTURE(mean);
  CAPTURE(sd);
  CHECK(r.report.max_regression <= 3 * std::sqrt(2.0) * sd);
}

TEST_CASE("warm start never needs more sweeps than a random start") {
  const double levels[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> warm(std::size(levels), 0.0), cold(std::size(levels), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Lattice16 l = lattice16(seed, 100000);
    const ModelDescriptor md(l.model);
    const QoIRecord target = compute_qoi(QoiKind::moments12, l.data, {}, {}, 0.05);
    CorrectionOptions opts;
    opts.max_sweeps = 200;
    const auto rc = correct(random_init(l.data, seed + 50), md, target, opts, seed + 60);
    REQUIRE(rc.report.converged);
    for (std::size_t li = 0; li < std::size(levels); ++li) {
      const auto rw = correct(warm_init(l, levels[li], target), md, target, opts, seed + 70 + li);
      REQUIRE(rw.report.converged);
      warm[li] += rw.report.sweeps_used / 5.0;
      cold[li] += rc.report.sweeps_used / 5.0;
    }
  }
  for (std::size_t li = 0; li < std::size(levels); ++li) {
    CAPTURE(levels[li]);
    CAPTURE(warm[li]);
    CAPTURE(cold[li]);
    CHECK(warm[li] <= cold[li]);
  }
}
