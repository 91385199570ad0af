#pragma once

// Lossy transform coding of sample sets. Samples are mapped through an
// orthonormal DCT (separable over the lattice axes), and only the leading
// coefficients holding a fraction e_presv of the energy are kept.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srs/model.hpp"
#include "srs/qoi.hpp"
#include "srs/sample_set.hpp"

namespace srs {

/// Orthonormal DCT-II: X_0 = sqrt(1/N) sum x_n, X_k = sqrt(2/N) sum x_n cos(pi (n + 1/2) k / N).
/// Uses the FFT route when N is a power of two large enough to benefit.
std::vector<double> dct_forward(std::span<const double> x);
/// Orthonormal DCT-III, the exact inverse of dct_forward.
std::vector<double> dct_inverse(std::span<const double> coeffs);

/// O(N^2) reference evaluation through the cosine basis.
std::vector<double> dct_forward_direct(std::span<const double> x);
std::vector<double> dct_inverse_direct(std::span<const double> coeffs);

/// FFTW REDFT10 / REDFT01 with orthonormal scaling; N must be a power of two.
std::vector<double> dct_forward_fft(std::span<const double> x);
std::vector<double> dct_inverse_fft(std::span<const double> coeffs);

/// Separable transform over a row-major array: axis 0 first. The inverse
/// runs the axes in reverse order.
std::vector<double> dct_nd(std::span<const double> x, std::span<const std::size_t> shape);
std::vector<double> dct_nd_inverse(std::span<const double> coeffs, std::span<const std::size_t> shape);

/// Row-major positions of the coefficients in storage order: by the sum of
/// the index coordinates, ties broken lexicographically. Identity in 1-D.
std::vector<std::size_t> prefix_order(std::span<const std::size_t> shape);

/// Largest J in [1, N] whose leading energy fraction is <= e_presv.
std::size_t select_prefix(std::span<const double> coeffs, double e_presv);

/// Reusable transform for one lattice shape: basis matrices per axis, plus
/// the storage order. Thread-safe for concurrent use.
class DctPlan {
 public:
  explicit DctPlan(std::vector<std::size_t> shape);

  std::size_t size() const { return n_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<std::size_t>& order() const { return order_; }

  /// Coefficients of x listed in storage order.
  void forward(std::span<const double> x, std::span<double> ordered) const;
  /// Reconstruction from the first j ordered coefficients (the rest zero).
  void inverse(std::span<const double> ordered_prefix, std::span<double> x) const;

 private:
  void apply_axis(std::span<double> data, std::size_t axis, bool inverse) const;

  std::vector<std::size_t> shape_;
  std::size_t n_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> basis_;  // per axis, len x len row-major, row k = k-th basis vector
};

struct CompressedSample {
  std::uint32_t j_kept = 0;
  std::vector<double> coeffs;
  friend bool operator==(const CompressedSample&, const CompressedSample&) = default;
};

struct Archive {
  static constexpr std::uint16_t kVersion = 1;

  std::uint16_t version = kVersion;
  double e_presv = 1.0;
  SampleKind kind = SampleKind::continuous;
  std::vector<std::size_t> shape;
  ModelDescriptor model;
  QoIRecord qoi;
  std::vector<CompressedSample> samples;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return shape_product(shape); }
  double compression() const { return 1.0 - e_presv; }
};

/// Metadata produced while compressing; it is reported alongside the archive.
struct CompressionStats {
  double mean_kept = 0;           ///< average retained coefficients per sample
  double retained_energy = 0;     ///< average retained energy fraction
  double max_retained_energy = 0;
  std::size_t payload_bytes = 0;  ///< serialized archive size
};

Archive compress_set(const SampleSet& samples, double e_presv, const ModelDescriptor& model,
                     const QoIRecord& qoi, CompressionStats* stats = nullptr);

/// Zero-pads every prefix, inverts the transform and, for spin archives,
/// maps each entry to +1 if it is >= 0 and to -1 otherwise.
SampleSet decompress_set(const Archive& a);

std::string serialize_archive(const Archive& a);
Archive deserialize_archive(std::string_view bytes);

std::string serialize_samples(const SampleSet& s);
SampleSet deserialize_samples(std::string_view bytes);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

inline void write_archive(const std::string& path, const Archive& a) { write_file(path, serialize_archive(a)); }
inline Archive read_archive(const std::string& path) { return deserialize_archive(read_file(path)); }
inline void write_samples(const std::string& path, const SampleSet& s) { write_file(path, serialize_samples(s)); }
inline SampleSet read_samples(const std::string& path) { return deserialize_samples(read_file(path)); }

}  // namespace srs
