#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "srs/codec.hpp"
#include "srs/error.hpp"
#include "srs/qoi.hpp"
#include "support.hpp"

using namespace srs;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Raw cosine sum of the DCT-II, no scaling.
std::vector<double> raw_dct(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[k] += x[i] * std::cos(std::numbers::pi * (i + 0.5) * k / n);
  }
  return out;
}

ModelDescriptor dummy_model(std::size_t n, SampleKind kind) {
  if (kind == SampleKind::spin) return ModelDescriptor(IsingModel(n));
  return ModelDescriptor(GaussianModel(Vector::Zero(static_cast<Eigen::Index>(n)),
                                       Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))));
}

Archive compress(const SampleSet& s, double e) {
  const ModelDescriptor m = dummy_model(s.dim(), s.kind());
  return compress_set(s, e, m, compute_qoi(QoiKind::moments12, s, {}, {}, 0.05));
}

double total_kept(const Archive& a) {
  double t = 0;
  for (const auto& c : a.samples) t += c.j_kept;
  return t;
}

}  // namespace

TEST_CASE("dct_forward examples") {
  const std::vector<double> c(8, 1.5);
  const auto x = dct_forward(c);
  CHECK(x[0] == doctest::Approx(1.5 * std::sqrt(8.0)));
  for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(x[k]) < 1e-14);

  const std::vector<double> e0{1, 0, 0, 0};
  const auto raw = raw_dct(e0);
  CHECK(raw[1] == doctest::Approx(0.92388).epsilon(1e-5));
  CHECK(raw[2] == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(raw[3] == doctest::Approx(0.38268).epsilon(1e-5));
  const auto ortho = dct_forward(e0);
  CHECK(ortho[0] == doctest::Approx(raw[0] * std::sqrt(1.0 / 4)));
  for (std::size_t k = 1; k < 4; ++k) CHECK(ortho[k] == doctest::Approx(raw[k] * std::sqrt(2.0 / 4)));

  CHECK_THROWS_AS(dct_forward(std::vector<double>{}), Error);
  CHECK_THROWS_AS(dct_inverse(std::vector<double>{}), Error);
}

TEST_CASE("Parseval and round trip over many lengths") {
  for (std::size_t n : {1, 2, 3, 5, 16, 17, 64, 100, 128, 256, 1000, 1024}) {
    CAPTURE(n);
    const auto x = test::random_vector(n, n);
    const auto c = dct_forward(x);
    CHECK(std::abs(norm(c) - norm(x)) < 1e-12 * std::max(1.0, norm(x)));
    const auto back = dct_inverse(c);
    CHECK(test::max_abs_diff(back, x) < 1e-10 * std::max(1.0, norm(x)));
  }
}

TEST_CASE("dct_inverse examples") {
  CHECK(dct_inverse(std::vector<double>(5, 0.0)) == std::vector<double>(5, 0.0));
  std::vector<double> dc(9, 0.0);
  dc[0] = 3.0 * 0.7;
  for (double v : dct_inverse(dc)) CHECK(v == doctest::Approx(0.7));
}

TEST_CASE("direct and FFT paths agree") {
  for (std::size_t n : {2, 4, 8, 64, 128, 512}) {
    const auto x = test::random_vector(n, 40 + n);
    CHECK(test::max_abs_diff(dct_forward_direct(x), dct_forward_fft(x)) < 1e-10);
    CHECK(test::max_abs_diff(dct_inverse_direct(x), dct_inverse_fft(x)) < 1e-10);
  }
  CHECK_THROWS_AS(dct_forward_fft(test::random_vector(12, 1)), Error);
}

TEST_CASE("N-D transform") {
  const std::vector<std::size_t> s22{2, 2};
  const auto c = dct_nd(std::vector<double>(4, 0.25), s22);
  CHECK(c[0] == doctest::Approx(0.5));
  for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(c[k]) < 1e-15);

  const std::vector<std::size_t> s16{16, 16};
  const auto x = test::random_vector(256, 77);
  CHECK(test::max_abs_diff(dct_nd_inverse(dct_nd(x, s16), s16), x) < 1e-10);

  // Rows, then columns, by hand.
  const std::vector<std::size_t> s35{3, 5};
  const auto y = test::random_vector(15, 78);
  std::vector<double> t(15);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto row = dct_forward(std::vector<double>(y.begin() + r * 5, y.begin() + r * 5 + 5));
    std::copy(row.begin(), row.end(), t.begin() + r * 5);
  }
  for (std::size_t col = 0; col < 5; ++col) {
    const auto v = dct_forward(std::vector<double>{t[col], t[5 + col], t[10 + col]});
    for (std::size_t r = 0; r < 3; ++r) t[r * 5 + col] = v[r];
  }
  CHECK(test::max_abs_diff(dct_nd(y, s35), t) < 1e-12);

  const std::vector<std::size_t> bad{3, 3};
  CHECK_THROWS_AS(dct_nd(x, bad), Error);
}

TEST_CASE("prefix order sorts by coordinate sum, then lexicographically") {
  const std::vector<std::size_t> s33{3, 3}, s4{4};
  CHECK(prefix_order(s33) == std::vector<std::size_t>{0, 1, 3, 2, 4, 6, 5, 7, 8});
  CHECK(prefix_order(s4) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("select_prefix examples") {
  const auto x = test::random_vector(10, 5);
  CHECK(select_prefix(x, 1.0) == 10);
  CHECK(select_prefix(std::vector<double>{3, 1, 0, 0}, 0.9) == 1);
  CHECK(select_prefix(std::vector<double>{1, 3}, 0.05) == 1);
  CHECK_THROWS_AS(select_prefix(std::vector<double>{0, 0}, 0.5), Error);
  CHECK_THROWS_AS(select_prefix(x, 0.0), Error);
  CHECK_THROWS_AS(select_prefix(x, 1.5), Error);
}

TEST_CASE("select_prefix keeps the largest qualifying prefix") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = test::random_vector(20, seed);
    double total = 0;
    for (double v : x) total += v * v;
    for (double e : {0.05, 0.3, 0.5, 0.77, 0.99}) {
      const std::size_t j = select_prefix(x, e);
      double kept = 0;
      for (std::size_t k = 0; k < j; ++k) kept += x[k] * x[k];
      if (j > 1) CHECK(kept / total <= e);
      if (j < x.size()) CHECK((kept + x[j] * x[j]) / total > e);
    }
  }
}

TEST_CASE("DctPlan agrees with dct_nd in storage order") {
  const std::vector<std::size_t> shape{4, 6};
  const DctPlan plan(shape);
  const auto x = test::random_vector(24, 9);
  std::vector<double> ordered(24), back(24);
  plan.forward(x, ordered);
  const auto full = dct_nd(x, shape);
  for (std::size_t k = 0; k < 24; ++k) CHECK(ordered[k] == doctest::Approx(full[plan.order()[k]]).epsilon(1e-12));
  plan.inverse(ordered, back);
  CHECK(test::max_abs_diff(back, x) < 1e-12);
  // Prefix inverse equals the full inverse of the zero-padded coefficients.
  std::vector<double> padded(24, 0.0);
  for (std::size_t k = 0; k < 7; ++k) padded[plan.order()[k]] = ordered[k];
  plan.inverse(std::span<const double>(ordered.data(), 7), back);
  CHECK(test::max_abs_diff(back, dct_nd_inverse(padded, shape)) < 1e-12);
}

TEST_CASE("lossless limit") {
  const SampleSet c = test::random_continuous(50, 16, 3, {4, 4});
  const SampleSet back = decompress_set(compress(c, 1.0));
  CHECK(test::max_abs_diff(std::vector<double>(back.values().begin(), back.values().end()),
                           std::vector<double>(c.values().begin(), c.values().end())) < 1e-9);
  CHECK(back.shape() == c.shape());

  const SampleSet s = test::random_spins(200, 16, 4);
  CHECK(decompress_set(compress(s, 1.0)) == s);
}

TEST_CASE("constant samples reconstruct exactly at any level") {
  const SampleSet c(SampleKind::continuous, 8, std::vector<double>(80, 0.375));
  for (double e : {0.01, 0.5, 1.0}) {
    const Archive a = compress(c, e);
    for (const auto& cs : a.samples) CHECK(cs.j_kept == (e < 1.0 ? 1u : 8u));
    const SampleSet r = decompress_set(a);
    for (double v : r.values()) CHECK(v == doctest::Approx(0.375).epsilon(1e-14));
  }
}

TEST_CASE("kept counts, nesting and reconstruction error are monotone in e_presv") {
  const SampleSet c = test::random_continuous(100, 32, 5);
  const double levels[] = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  double prev_kept = 0, prev_err = INFINITY;
  std::vector<std::uint32_t> prev_j(100, 0);
  for (double e : levels) {
    const Archive a = compress(c, e);
    CHECK(total_kept(a) >= prev_kept);
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(a.samples[i].j_kept >= prev_j[i]);
      prev_j[i] = a.samples[i].j_kept;
    }
    prev_kept = total_kept(a);
    const SampleSet r = decompress_set(a);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < c.values().size(); ++k) {
      num += (r.values()[k] - c.values()[k]) * (r.values()[k] - c.values()[k]);
      den += c.values()[k] * c.values()[k];
    }
    const double err = std::sqrt(num / den);
    CHECK(err <= prev_err + 1e-15);
    prev_err = err;
  }
}

TEST_CASE("retained energy never exceeds e_presv when more than one coefficient is kept") {
  const SampleSet c = test::random_continuous(200, 16, 6, {4, 4});
  for (double e : {0.1, 0.5, 0.9}) {
    const ModelDescriptor m = dummy_model(16, SampleKind::continuous);
    CompressionStats stats;
    const Archive a = compress_set(c, e, m, compute_qoi(QoiKind::moments12, c, {}, {}, 0.05), &stats);
    const DctPlan plan(c.shape());
    std::vector<double> ordered(16);
    for (std::size_t i = 0; i < c.size(); ++i) {
      plan.forward(c.row(i), ordered);
      double kept = 0, total = 0;
      for (std::size_t k = 0; k < 16; ++k) total += ordered[k] * ordered[k];
      for (std::size_t k = 0; k < a.samples[i].j_kept; ++k) kept += ordered[k] * ordered[k];
      if (a.samples[i].j_kept > 1) CHECK(kept / total <= e);
    }
    CHECK(stats.payload_bytes == serialize_archive(a).size());
    CHECK(stats.retained_energy <= stats.max_retained_energy);
  }
}

TEST_CASE("archive and sample files round-trip bit-exactly") {
  const SampleSet c = test::random_continuous(30, 16, 7, {4, 4});
  const Archive a = compress(c, 0.6);
  const std::string bytes = serialize_archive(a);
  CHECK(bytes.substr(0, 4) == "SRSA");
  std::uint16_t version = 0;
  std::memcpy(&version, bytes.data() + 4, 2);
  CHECK(version == 1);
  CHECK(static_cast<unsigned char>(bytes[6]) == 0);
  CHECK(static_cast<unsigned char>(bytes[7]) == 2);
  const Archive b = deserialize_archive(bytes);
  CHECK(serialize_archive(b) == bytes);
  CHECK(b.samples == a.samples);
  CHECK(b.e_presv == a.e_presv);
  CHECK(b.shape == a.shape);

  const std::string sb = serialize_samples(c);
  CHECK(sb.substr(0, 4) == "SRSX");
  CHECK(deserialize_samples(sb) == c);
  const SampleSet s = test::random_spins(10, 5, 8);
  CHECK(deserialize_samples(serialize_samples(s)) == s);
}

TEST_CASE("corrupt files are rejected as format errors") {
  const SampleSet c = test::random_continuous(10, 8, 9);
  const std::string good = serialize_archive(compress(c, 0.5));
  const auto expect_format = [](auto&& fn) {
    try {
      fn();
      FAIL("expected a format error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
    }
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  expect_format([&] { deserialize_archive(bad_magic); });
  std::string bad_version = good;
  bad_version[4] = 9;
  expect_format([&] { deserialize_archive(bad_version); });
  expect_format([&] { deserialize_archive(good.substr(0, good.size() - 3)); });
  expect_format([&] { deserialize_archive(good + "x"); });
  expect_format([&] { deserialize_samples(serialize_samples(c).substr(0, 20)); });
  expect_format([&] { deserialize_samples(good); });

  try {
    read_file("/nonexistent/dir/file.srsx");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}
