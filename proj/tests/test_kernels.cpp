#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srs/kernels.hpp"
#include "support.hpp"

using namespace srs::kernels;

namespace {

// Lengths around the vector widths so every tail path is hit.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 257};

double rel_close(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar table matches plain loops") {
  const auto& k = scalar_table();
  for (std::size_t n : kLengths) {
    const auto a = test::random_vector(n, 1 + n), b = test::random_vector(n, 2 + n);
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) d += a[i] * b[i];
    CHECK(rel_close(k.dot(a.data(), b.data(), n), d) < 1e-13);

    auto y = b;
    k.axpy(0.7, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(b[i] + 0.7 * a[i]).epsilon(1e-15));
  }
}

TEST_CASE("scalar gemv and gemv_t follow the row-major definitions") {
  const auto& k = scalar_table();
  const std::size_t rows = 5, cols = 7;
  const auto a = test::random_vector(rows * cols, 3);
  const auto x = test::random_vector(cols, 4), xt = test::random_vector(rows, 5);
  std::vector<double> y(rows), yt(cols, 1.0);
  k.gemv(a.data(), rows, cols, x.data(), y.data());
  k.gemv_t(a.data(), rows, cols, xt.data(), yt.data());
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < cols; ++c) s += a[r * cols + c] * x[c];
    CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 1.0;
    for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + c] * xt[r];
    CHECK(yt[c] == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("scalar Phi4 helpers") {
  const auto& k = scalar_table();
  const std::vector<double> x{1.0, -2.0, 0.5}, s{0.0, 1.0, -1.0};
  std::vector<double> out(3);
  k.phi4_drift(x.data(), s.data(), 1.0, 1.0, 1.0, out.data(), 3);
  CHECK(out[0] == doctest::Approx(-6.0));
  CHECK(out[1] == doctest::Approx(32.0 + 4.0 - 1.0));
  CHECK(out[2] == doctest::Approx(-0.5 - 1.0 + 1.0));

  Phi4Sums acc;
  k.phi4_sums(x.data(), s.data(), 3, &acc);
  CHECK(acc.x2 == doctest::Approx(1 + 4 + 0.25));
  CHECK(acc.x4 == doctest::Approx(1 + 16 + 0.0625));
  CHECK(acc.x6 == doctest::Approx(1 + 64 + 0.015625));
  CHECK(acc.x3s == doctest::Approx(0 - 8 - 0.125));
  CHECK(acc.xs == doctest::Approx(0 - 2 - 0.5));
  CHECK(acc.s2 == doctest::Approx(0 + 1 + 1));

  std::vector<double> xl{1.0, 2.0}, dr{0.5, -1.0}, z{1.0, 0.0};
  k.langevin_update(xl.data(), dr.data(), z.data(), 0.5, 2);
  CHECK(xl[0] == doctest::Approx(1.0 + 0.25 + 1.0));
  CHECK(xl[1] == doctest::Approx(2.0 - 0.5));
}

TEST_CASE("every available ISA agrees with the scalar reference") {
  const auto& ref = scalar_table();
  for (const KernelTable* t : available_tables()) {
    CAPTURE(to_string(t->isa));
    for (std::size_t n : kLengths) {
      CAPTURE(n);
      const auto a = test::random_vector(n, 10 + n), b = test::random_vector(n, 20 + n);
      CHECK(rel_close(t->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) < 1e-12);

      auto y1 = b, y2 = b;
      t->axpy(-1.3, a.data(), y1.data(), n);
      ref.axpy(-1.3, a.data(), y2.data(), n);
      CHECK(test::max_abs_diff(y1, y2) < 1e-14);

      const auto z = test::random_vector(n, 30 + n);
      auto l1 = a, l2 = a;
      t->langevin_update(l1.data(), b.data(), z.data(), 0.05, n);
      ref.langevin_update(l2.data(), b.data(), z.data(), 0.05, n);
      CHECK(test::max_abs_diff(l1, l2) < 1e-14);

      std::vector<double> d1(n), d2(n);
      t->phi4_drift(a.data(), b.data(), 0.11, 0.21, 0.31, d1.data(), n);
      ref.phi4_drift(a.data(), b.data(), 0.11, 0.21, 0.31, d2.data(), n);
      CHECK(test::max_abs_diff(d1, d2) < 1e-14);

      Phi4Sums s1, s2;
      t->phi4_sums(a.data(), b.data(), n, &s1);
      ref.phi4_sums(a.data(), b.data(), n, &s2);
      CHECK(rel_close(s1.x2, s2.x2) < 1e-12);
      CHECK(rel_close(s1.x4, s2.x4) < 1e-12);
      CHECK(rel_close(s1.x6, s2.x6) < 1e-12);
      CHECK(rel_close(s1.x3s, s2.x3s) < 1e-12);
      CHECK(rel_close(s1.xs, s2.xs) < 1e-12);
      CHECK(rel_close(s1.s2, s2.s2) < 1e-12);

      for (std::size_t rows : {std::size_t{1}, std::size_t{3}, std::size_t{8}}) {
        const auto m = test::random_vector(rows * n, 40 + n + rows);
        const auto xr = test::random_vector(rows, 50 + rows);
        std::vector<double> g1(rows), g2(rows), h1(n, 0.5), h2(n, 0.5);
        t->gemv(m.data(), rows, n, a.data(), g1.data());
        ref.gemv(m.data(), rows, n, a.data(), g2.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(rel_close(g1[r], g2[r]) < 1e-12);
        t->gemv_t(m.data(), rows, n, xr.data(), h1.data());
        ref.gemv_t(m.data(), rows, n, xr.data(), h2.data());
        CHECK(test::max_abs_diff(h1, h2) < 1e-13);
      }
    }
  }
}

TEST_CASE("ISA selection") {
  CHECK(select(Isa::scalar));
  CHECK(active().isa == Isa::scalar);
  const auto tables = available_tables();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == Isa::scalar);
  for (const KernelTable* t : tables) CHECK(select(t->isa));
  CHECK(active().isa == tables.back()->isa);
}
