#include "srs/sample_set.hpp"

#include <algorithm>
#include <string>

#include "srs/error.hpp"

namespace srs {

std::string_view to_string(SampleKind kind) {
  return kind == SampleKind::spin ? "spin" : "continuous";
}

std::size_t shape_product(std::span<const std::size_t> shape) {
  std::size_t p = 1;
  for (std::size_t d : shape) p *= d;
  return p;
}

SampleSet::SampleSet(SampleKind kind, std::size_t m, std::size_t n,
                     std::vector<std::size_t> shape)
    : kind_(kind), m_(m), n_(n), shape_(std::move(shape)), values_(m * n, 0.0) {
  require(m >= 1 && n >= 1, "sample set needs M >= 1 and N >= 1");
  require(shape_.empty() || shape_product(shape_) == n, "lattice shape does not match dimension");
  if (kind == SampleKind::spin) std::fill(values_.begin(), values_.end(), 1.0);
}

SampleSet::SampleSet(SampleKind kind, std::size_t n, std::vector<double> values,
                     std::vector<std::size_t> shape)
    : kind_(kind), m_(n == 0 ? 0 : values.size() / n), n_(n), shape_(std::move(shape)),
      values_(std::move(values)) {
  require(n >= 1 && values_.size() % n == 0 && m_ >= 1,
          "sample payload is not a whole number of rows");
  validate();
}

std::vector<std::size_t> SampleSet::shape() const {
  if (shape_.empty()) return {n_};
  return shape_;
}

void SampleSet::validate() const {
  require(m_ >= 1 && n_ >= 1, "sample set needs M >= 1 and N >= 1");
  require(values_.size() == m_ * n_, "sample payload size mismatch");
  require(shape_.empty() || shape_product(shape_) == n_, "lattice shape does not match dimension");
  if (kind_ == SampleKind::spin) {
    for (double v : values_) {
      if (v != 1.0 && v != -1.0) fail(ErrorKind::invalid_argument, "spin sample entry is not +-1");
    }
  }
}

}  // namespace srs
