#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "srs/codec.hpp"
#include "srs/error.hpp"
#include "srs/kernels.hpp"

namespace srs {

namespace {

constexpr std::size_t kFftMin = 64;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double dct_scale(std::size_t k, std::size_t n) {
  return std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
}

// Row k holds the k-th orthonormal basis vector.
std::vector<double> basis_matrix(std::size_t n) {
  std::vector<double> b(n * n);
  const double w = std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = dct_scale(k, n);
    for (std::size_t i = 0; i < n; ++i) {
      b[k * n + i] = s * std::cos(w * (static_cast<double>(i) + 0.5) * static_cast<double>(k));
    }
  }
  return b;
}

// Plans are created once per (length, direction). FFTW planning is not
// thread-safe; executing an existing plan on new arrays is.
fftw_plan fft_plan(std::size_t n, bool inverse) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, bool>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find({n, inverse});
  if (it != plans.end()) return it->second;
  std::vector<double> in(n), out(n);
  fftw_plan p = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(),
                                 inverse ? FFTW_REDFT01 : FFTW_REDFT10,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) fail(ErrorKind::numerical, "FFTW could not plan a DCT of length " + std::to_string(n));
  plans.emplace(std::make_pair(n, inverse), p);
  return p;
}

// REDFT10 gives Y_k = 2 sum x_n cos(...), so X_k = s_k Y_k / 2.
void fft_forward(const double* x, double* out, std::size_t n) {
  std::vector<double> in(x, x + n);
  fftw_execute_r2r(fft_plan(n, false), in.data(), out);
  for (std::size_t k = 0; k < n; ++k) out[k] *= 0.5 * dct_scale(k, n);
}

// REDFT01 gives y_n = Z_0 + 2 sum_{k>0} Z_k cos(...), so Z_0 = s_0 X_0 and
// Z_k = s_k X_k / 2.
void fft_inverse(const double* coeffs, double* out, std::size_t n) {
  std::vector<double> z(n);
  z[0] = dct_scale(0, n) * coeffs[0];
  for (std::size_t k = 1; k < n; ++k) z[k] = 0.5 * dct_scale(k, n) * coeffs[k];
  fftw_execute_r2r(fft_plan(n, true), z.data(), out);
}

void check_nonempty(std::size_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "DCT of an empty vector");
}

// Applies a 1-D transform to every line of `data` along `axis`.
template <class F>
void for_each_line(std::span<double> data, std::span<const std::size_t> shape, std::size_t axis, F&& f) {
  const std::size_t len = shape[axis];
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
  const std::size_t outer = data.size() / (len * stride);
  std::vector<double> line(len), out(len);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < stride; ++in) {
      double* base = data.data() + o * len * stride + in;
      for (std::size_t t = 0; t < len; ++t) line[t] = base[t * stride];
      f(line, out);
      for (std::size_t t = 0; t < len; ++t) base[t * stride] = out[t];
    }
  }
}

void check_shape(std::size_t size, std::span<const std::size_t> shape) {
  if (shape.empty() || shape_product(shape) != size || size == 0) {
    fail(ErrorKind::invalid_argument, "array size does not match its shape");
  }
}

}  // namespace

std::vector<double> dct_forward_direct(std::span<const double> x) {
  const std::size_t n = x.size();
  check_nonempty(n);
  std::vector<double> out(n);
  const double w = std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += x[i] * std::cos(w * (static_cast<double>(i) + 0.5) * static_cast<double>(k));
    }
    out[k] = dct_scale(k, n) * s;
  }
  return out;
}

std::vector<double> dct_inverse_direct(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  check_nonempty(n);
  std::vector<double> out(n);
  const double w = std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += dct_scale(k, n) * coeffs[k] *
           std::cos(w * (static_cast<double>(i) + 0.5) * static_cast<double>(k));
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> dct_forward_fft(std::span<const double> x) {
  check_nonempty(x.size());
  require(is_pow2(x.size()), "FFT DCT path needs a power-of-two length");
  std::vector<double> out(x.size());
  fft_forward(x.data(), out.data(), x.size());
  return out;
}

std::vector<double> dct_inverse_fft(std::span<const double> coeffs) {
  check_nonempty(coeffs.size());
  require(is_pow2(coeffs.size()), "FFT DCT path needs a power-of-two length");
  std::vector<double> out(coeffs.size());
  fft_inverse(coeffs.data(), out.data(), coeffs.size());
  return out;
}

std::vector<double> dct_forward(std::span<const double> x) {
  if (is_pow2(x.size()) && x.size() >= kFftMin) return dct_forward_fft(x);
  return dct_forward_direct(x);
}

std::vector<double> dct_inverse(std::span<const double> coeffs) {
  if (is_pow2(coeffs.size()) && coeffs.size() >= kFftMin) return dct_inverse_fft(coeffs);
  return dct_inverse_direct(coeffs);
}

std::vector<double> dct_nd(std::span<const double> x, std::span<const std::size_t> shape) {
  check_shape(x.size(), shape);
  std::vector<double> data(x.begin(), x.end());
  for (std::size_t axis = 0; axis < shape.size(); ++axis) {
    for_each_line(data, shape, axis, [](const std::vector<double>& in, std::vector<double>& out) {
      out = dct_forward(in);
    });
  }
  return data;
}

std::vector<double> dct_nd_inverse(std::span<const double> coeffs, std::span<const std::size_t> shape) {
  check_shape(coeffs.size(), shape);
  std::vector<double> data(coeffs.begin(), coeffs.end());
  for (std::size_t axis = shape.size(); axis-- > 0;) {
    for_each_line(data, shape, axis, [](const std::vector<double>& in, std::vector<double>& out) {
      out = dct_inverse(in);
    });
  }
  return data;
}

std::vector<std::size_t> prefix_order(std::span<const std::size_t> shape) {
  const std::size_t n = shape_product(shape);
  check_shape(n, shape);
  const std::size_t nd = shape.size();
  std::vector<std::size_t> coords(n * nd), sums(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t rem = p;
    for (std::size_t a = nd; a-- > 0;) {
      coords[p * nd + a] = rem % shape[a];
      rem /= shape[a];
      sums[p] += coords[p * nd + a];
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Row-major position is already lexicographic in the coordinates.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });
  return order;
}

std::size_t select_prefix(std::span<const double> coeffs, double e_presv) {
  if (!(e_presv > 0.0 && e_presv <= 1.0)) {
    fail(ErrorKind::invalid_argument, "e_presv must lie in (0, 1]");
  }
  check_nonempty(coeffs.size());
  std::vector<double> cum(coeffs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    acc += coeffs[k] * coeffs[k];
    cum[k] = acc;
  }
  const double total = acc;
  if (!(total > 0.0)) fail(ErrorKind::invalid_argument, "cannot select coefficients of a zero-energy signal");
  std::size_t j = 1;
  while (j < coeffs.size() && cum[j] / total <= e_presv) ++j;
  return j;
}

DctPlan::DctPlan(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  n_ = shape_product(shape_);
  check_shape(n_, shape_);
  order_ = prefix_order(shape_);
  basis_.reserve(shape_.size());
  for (std::size_t len : shape_) {
    if (is_pow2(len) && len >= kFftMin) {
      basis_.emplace_back();
      fft_plan(len, false);
      fft_plan(len, true);
    } else {
      basis_.push_back(basis_matrix(len));
    }
  }
}

void DctPlan::apply_axis(std::span<double> data, std::size_t axis, bool inverse) const {
  const std::size_t len = shape_[axis];
  const auto& b = basis_[axis];
  const auto& k = kernels::active();
  for_each_line(data, shape_, axis, [&](const std::vector<double>& in, std::vector<double>& out) {
    if (b.empty()) {
      inverse ? fft_inverse(in.data(), out.data(), len) : fft_forward(in.data(), out.data(), len);
    } else if (inverse) {
      std::fill(out.begin(), out.end(), 0.0);
      k.gemv_t(b.data(), len, len, in.data(), out.data());
    } else {
      k.gemv(b.data(), len, len, in.data(), out.data());
    }
  });
}

void DctPlan::forward(std::span<const double> x, std::span<double> ordered) const {
  require(x.size() == n_ && ordered.size() == n_, "sample length does not match the plan");
  std::vector<double> data(x.begin(), x.end());
  for (std::size_t axis = 0; axis < shape_.size(); ++axis) apply_axis(data, axis, false);
  for (std::size_t p = 0; p < n_; ++p) ordered[p] = data[order_[p]];
}

void DctPlan::inverse(std::span<const double> ordered_prefix, std::span<double> x) const {
  const std::size_t j = ordered_prefix.size();
  require(j >= 1 && j <= n_ && x.size() == n_, "coefficient prefix does not match the plan");
  // 1-D with an explicit basis: x = sum_{k<j} X_k b_k, linear in the prefix length.
  if (shape_.size() == 1 && !basis_[0].empty()) {
    std::fill(x.begin(), x.end(), 0.0);
    kernels::active().gemv_t(basis_[0].data(), j, n_, ordered_prefix.data(), x.data());
    return;
  }
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t p = 0; p < j; ++p) x[order_[p]] = ordered_prefix[p];
  for (std::size_t axis = shape_.size(); axis-- > 0;) apply_axis(x, axis, true);
}

}  // namespace srs
