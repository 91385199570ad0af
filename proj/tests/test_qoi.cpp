#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "srs/error.hpp"
#include "srs/lattice.hpp"
#include "srs/qoi.hpp"
#include "srs/serialize.hpp"
#include "support.hpp"

using namespace srs;

namespace {

SampleSet permuted(const SampleSet& s, std::uint64_t seed) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), std::mt19937_64(seed));
  std::vector<double> v;
  v.reserve(s.values().size());
  for (std::size_t i : idx) v.insert(v.end(), s.row(i).begin(), s.row(i).end());
  return SampleSet(s.kind(), s.dim(), std::move(v), s.has_shape() ? s.shape() : std::vector<std::size_t>{});
}

// Multiples of 1/8 in [-2, 2]; with M a power of two every sum below is exact.
SampleSet dyadic(std::size_t m, std::size_t n, std::uint64_t seed, std::vector<std::size_t> shape = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(-16, 16);
  std::vector<double> v(m * n);
  for (double& x : v) x = u(rng) / 8.0;
  return SampleSet(SampleKind::continuous, n, std::move(v), std::move(shape));
}

Phi4Stats phi4_oracle(const SampleSet& s, const std::vector<Edge>& edges) {
  double q1 = 0, q2 = 0, q3 = 0;
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (const Edge& e : edges) q1 += s(r, e.a) * s(r, e.b);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      q2 += std::pow(s(r, i), 2);
      q3 += std::pow(s(r, i), 4);
    }
  }
  const double m = static_cast<double>(s.size());
  return {q1 / (m * edges.size()), q2 / (m * s.dim()), q3 / (m * s.dim())};
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

TemperatureSpec unit_spec() {
  TemperatureSpec t;
  t.masses = {1.0};
  t.boltzmann = 1.0;
  return t;
}

}  // namespace

TEST_CASE("moments12 examples") {
  const SampleSet c(SampleKind::continuous, 3, std::vector<double>{0.5, -1, 2, 0.5, -1, 2, 0.5, -1, 2});
  const Moments mc = moments12(c);
  CHECK(mc.m1(0) == 0.5);
  CHECK(mc.m1(1) == -1.0);
  CHECK(mc.m1(2) == 2.0);
  CHECK(max_abs(mc.m2) == 0.0);

  const SampleSet pm(SampleKind::spin, 2, std::vector<double>{1, -1, -1, 1});
  const Moments m = moments12(pm);
  CHECK(m.m1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.m2(0, 0) == 2.0);
  CHECK(m.m2(0, 1) == -2.0);
  CHECK(m.m2(1, 0) == -2.0);
  CHECK(m.m2(1, 1) == 2.0);

  CHECK_THROWS_AS(moments12(SampleSet(SampleKind::continuous, 2, std::vector<double>{1, 2})), Error);
}

TEST_CASE("moments12 agrees with the naive two-pass oracle") {
  for (std::size_t n : {1, 3, 16, 33}) {
    for (std::size_t m : {2, 17, 1000}) {
      const SampleSet s = test::random_continuous(m, n, 1000 * n + m);
      const Moments a = moments12(s), b = moments12_naive(s);
      CHECK((a.m1 - b.m1).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(max_abs(a.m2 - b.m2) < 1e-12);
      CHECK(max_abs(a.m2 - a.m2.transpose()) == 0.0);
    }
  }
}

TEST_CASE("moment_error examples") {
  const SampleSet s = test::random_continuous(50, 4, 2);
  QoIRecord target;
  target.payload = moments12(s);
  CHECK(moment_error(target, s) == 0.0);

  Moments t, r;
  t.m1 = Vector::Zero(2);
  r.m1 = Vector(2);
  r.m1 << 0.03, -0.07;
  t.m2 = r.m2 = Matrix::Identity(2, 2);
  CHECK(moment_error(t, r).max() == doctest::Approx(0.07));
  CHECK(moment_error(r, t).max() == moment_error(t, r).max());

  QoIRecord wrong;
  wrong.payload = Phi4Stats{};
  CHECK_THROWS_AS(moment_error(wrong, s), Error);
}

TEST_CASE("moment_error is symmetric and separates e1 from e2") {
  const SampleSet a = test::random_continuous(200, 5, 3), b = test::random_continuous(200, 5, 4);
  const Moments ma = moments12(a), mb = moments12(b);
  const MomentError ab = moment_error(ma, mb), ba = moment_error(mb, ma);
  CHECK(ab.e1 == ba.e1);
  CHECK(ab.e2 == ba.e2);
  CHECK(ab.e1 == doctest::Approx((ma.m1 - mb.m1).cwiseAbs().maxCoeff()));
  CHECK(ab.e2 == doctest::Approx(max_abs(ma.m2 - mb.m2)));
}

TEST_CASE("QoIs are invariant under sample permutation") {
  const std::vector<std::size_t> shape{4, 4};
  const auto edges = lattice_edges(shape, Boundary::periodic);
  const SampleSet s = dyadic(256, 16, 5, shape);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SampleSet p = permuted(s, seed);
    const Moments a = moments12(s), b = moments12(p);
    CHECK(a.m1 == b.m1);
    CHECK(a.m2 == b.m2);
    const Phi4Stats q = phi4_stats(s, edges), r = phi4_stats(p, edges);
    CHECK(q.q1 == r.q1);
    CHECK(q.q2 == r.q2);
    CHECK(q.q3 == r.q3);
  }
  // Arbitrary reals: only reassociation error remains.
  const SampleSet g = test::random_continuous(999, 16, 6, shape);
  const SampleSet gp = permuted(g, 7);
  CHECK(max_abs(moments12(g).m2 - moments12(gp).m2) < 1e-13);
}

TEST_CASE("phi4_stats examples and nested-loop oracle") {
  const std::vector<std::size_t> shape{3, 4};
  const auto edges = lattice_edges(shape, Boundary::periodic);
  const SampleSet zeros(SampleKind::continuous, 12, std::vector<double>(36, 0.0), shape);
  const Phi4Stats z = phi4_stats(zeros, edges);
  CHECK(z.q1 == 0.0);
  CHECK(z.q2 == 0.0);
  CHECK(z.q3 == 0.0);
  const SampleSet ones(SampleKind::continuous, 12, std::vector<double>(36, 1.0), shape);
  const Phi4Stats o = phi4_stats(ones, edges);
  CHECK(o.q1 == doctest::Approx(1.0));
  CHECK(o.q2 == doctest::Approx(1.0));
  CHECK(o.q3 == doctest::Approx(1.0));

  for (Boundary b : {Boundary::open, Boundary::periodic}) {
    const auto e = lattice_edges(shape, b);
    const SampleSet s = test::random_continuous(300, 12, 8, shape);
    const Phi4Stats got = phi4_stats(s, e), want = phi4_oracle(s, e);
    CHECK(std::abs(got.q1 - want.q1) < 1e-12);
    CHECK(std::abs(got.q2 - want.q2) < 1e-12);
    CHECK(std::abs(got.q3 - want.q3) < 1e-12);
  }
  CHECK_THROWS_AS(phi4_stats(ones, {}), Error);
}

TEST_CASE("temperature examples") {
  TemperatureSpec spec = unit_spec();
  const SampleSet still(SampleKind::continuous, 6, std::vector<double>(6, 0.0));
  CHECK(temperature(still, spec).group == 0.0);

  // Two atoms, N_DOF = 3, E_kin = 1.5 * k_B * 300.
  const SampleSet two(SampleKind::continuous, 6, std::vector<double>{30, 0, 0, 0, 0, 0});
  const TemperatureResult t = temperature(two, spec);
  CHECK(t.group == doctest::Approx(300.0));
  REQUIRE(t.per_row.size() == 1);
  CHECK(t.per_row[0] == doctest::Approx(300.0));

  std::vector<double> v = test::random_vector(60, 9, -5, 5);
  const SampleSet a(SampleKind::continuous, 6, v);
  for (double& x : v) x *= 2;
  const SampleSet b(SampleKind::continuous, 6, v);
  CHECK(temperature(b, spec).group == doctest::Approx(4 * temperature(a, spec).group).epsilon(1e-14));

  // Per-atom masses and fixed degrees of freedom.
  spec.masses = {1.0, 3.0};
  spec.n_fix_dofs = 1;
  const SampleSet w(SampleKind::continuous, 6, std::vector<double>{1, 0, 0, 0, 2, 0});
  CHECK(temperature(w, spec).group == doctest::Approx(2.0 * (0.5 + 6.0) / 2.0));
}

TEST_CASE("temperature rejects configurations without free degrees of freedom") {
  const SampleSet one(SampleKind::continuous, 3, std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(temperature(one, unit_spec()), Error);
  TemperatureSpec neg = unit_spec();
  neg.masses = {-1.0};
  CHECK_THROWS_AS(temperature(SampleSet(SampleKind::continuous, 6, std::vector<double>(6, 1.0)), neg), Error);
  CHECK_THROWS_AS(temperature(SampleSet(SampleKind::continuous, 4, std::vector<double>(4, 1.0)), unit_spec()),
                  Error);
}

TEST_CASE("Maxwell-Boltzmann velocities recover 300 K within 0.5 K") {
  const TemperatureSpec spec;  // aluminium, SI units
  const double sd = std::sqrt(spec.boltzmann * 300.0 / spec.masses[0]);
  const std::size_t m = 10000, atoms = 256;
  std::mt19937_64 rng(300);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> v(m * atoms * 3);
  for (double& x : v) x = z(rng);
  const double t = temperature(SampleSet(SampleKind::continuous, atoms * 3, std::move(v)), spec).group;
  CHECK(std::abs(t - 300.0) < 0.5);
}

TEST_CASE("tv_distance examples") {
  const Histogram p{{0, 5}, {3, 5}}, q{{0, 3}, {3, 1}}, far{{1, 7}, {2, 1}};
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(p, far) == doctest::Approx(1.0));
  CHECK(tv_distance(p, q) == doctest::Approx(0.25));
  const std::vector<double> a{0.5, 0.5}, b{0.75, 0.25};
  CHECK(tv_distance(a, b) == doctest::Approx(0.25));
  const std::vector<double> table{0.5, 0.0, 0.0, 0.5};
  CHECK(tv_distance(p, table) == doctest::Approx(0.0));
  CHECK_THROWS_AS(tv_distance(Histogram{}, p), Error);
  CHECK_THROWS_AS(tv_distance(a, table), Error);
}

TEST_CASE("tv_distance is a bounded metric") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(16), q(16), r(16);
    for (std::size_t s = 0; s < 16; ++s) {
      p[s] = u(rng) < 0.3 ? 0.0 : u(rng);
      q[s] = u(rng);
      r[s] = u(rng) * u(rng);
    }
    const double pq = tv_distance(p, q), qr = tv_distance(q, r), pr = tv_distance(p, r);
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(pq == doctest::Approx(tv_distance(q, p)).epsilon(1e-14));
    CHECK(pr <= pq + qr + 1e-12);
  }
}

TEST_CASE("spin histograms") {
  const SampleSet s(SampleKind::spin, 3, std::vector<double>{1, -1, -1, 1, -1, -1, -1, -1, 1});
  const Histogram h = spin_histogram(s);
  CHECK(h == Histogram{{1, 2}, {4, 1}});
  CHECK(spin_state_index(std::vector<double>{-1, 1, 1}) == 6);
  CHECK_THROWS_AS(spin_histogram(test::random_spins(4, 21, 1)), Error);
  CHECK_THROWS_AS(spin_histogram(test::random_continuous(4, 3, 1)), Error);
}

TEST_CASE("QoI records round-trip through JSON") {
  const SampleSet s = test::random_continuous(40, 3, 12);
  std::vector<QoIRecord> records;
  records.push_back(compute_qoi(QoiKind::moments12, s, {}, {}, 0.05));
  const std::vector<Edge> chain{Edge{0, 1}, Edge{1, 2}};
  records.push_back(compute_qoi(QoiKind::phi4_stats, s, chain, {}, 0.01));
  TemperatureSpec spec = unit_spec();
  spec.masses = {1.0};
  spec.n_dim = 1;
  records.push_back(compute_qoi(QoiKind::temperature, s, {}, spec, 0.5));
  for (const QoIRecord& r : records) {
    const Json j = to_json(r);
    const QoIRecord back = qoi_from_json(parse_json(dump(j)));
    CHECK(back.kind() == r.kind());
    CHECK(back.tolerance == r.tolerance);
    CHECK(dump(to_json(back)) == dump(j));
  }
  CHECK(qoi_error(records[0], s, {}) == 0.0);
  CHECK(qoi_error(records[1], s, chain) == 0.0);
  CHECK(qoi_error(records[2], s, {}) == 0.0);
  CHECK_THROWS_AS(compute_qoi(QoiKind::moments12, s, {}, {}, 0.0), Error);
}
