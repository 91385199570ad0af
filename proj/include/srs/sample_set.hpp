#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace srs {

enum class SampleKind : std::uint8_t { continuous = 0, spin = 1 };

std::string_view to_string(SampleKind kind);

/// M samples of dimension N stored row-major. Spin samples hold exactly
/// -1.0 / +1.0. The optional lattice shape describes how a sample is laid out
/// (e.g. {16, 16}); an empty shape means a flat vector.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(SampleKind kind, std::size_t m, std::size_t n, std::vector<std::size_t> shape = {});
  SampleSet(SampleKind kind, std::size_t n, std::vector<double> values,
            std::vector<std::size_t> shape = {});

  SampleKind kind() const { return kind_; }
  std::size_t size() const { return m_; }
  std::size_t dim() const { return n_; }

  /// Lattice shape; {N} when none was given.
  std::vector<std::size_t> shape() const;
  bool has_shape() const { return !shape_.empty(); }

  std::span<const double> row(std::size_t m) const { return {values_.data() + m * n_, n_}; }
  std::span<double> row(std::size_t m) { return {values_.data() + m * n_, n_}; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator()(std::size_t m, std::size_t i) const { return values_[m * n_ + i]; }
  double& operator()(std::size_t m, std::size_t i) { return values_[m * n_ + i]; }

  /// Throws if the invariants (spin alphabet, shape product) are violated.
  void validate() const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  SampleKind kind_ = SampleKind::continuous;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

std::size_t shape_product(std::span<const std::size_t> shape);

}  // namespace srs
