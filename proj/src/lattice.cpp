#include "srs/lattice.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "srs/error.hpp"
#include "srs/sample_set.hpp"

namespace srs {

std::vector<Edge> lattice_edges(std::span<const std::size_t> shape, Boundary boundary) {
  require(!shape.empty(), "lattice needs at least one axis");
  const std::size_t n = shape_product(shape);
  std::vector<std::size_t> stride(shape.size(), 1);
  for (std::size_t d = shape.size() - 1; d > 0; --d) stride[d - 1] = stride[d] * shape[d];

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::vector<Edge> edges;
  auto add = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    const auto a = static_cast<std::uint32_t>(std::min(i, j));
    const auto b = static_cast<std::uint32_t>(std::max(i, j));
    const std::pair<std::uint32_t, std::uint32_t> key{a, b};
    if (seen.insert(key).second) edges.push_back({key.first, key.second});
  };

  for (std::size_t site = 0; site < n; ++site) {
    for (std::size_t d = 0; d < shape.size(); ++d) {
      const std::size_t coord = (site / stride[d]) % shape[d];
      if (coord + 1 < shape[d]) {
        add(site, site + stride[d]);
      } else if (boundary == Boundary::periodic) {
        add(site, site - coord * stride[d]);
      }
    }
  }
  return edges;
}

void validate_edges(std::size_t n, std::span<const Edge> edges) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const Edge& e : edges) {
    require(e.a < n && e.b < n, "edge references a site outside the model");
    require(e.a != e.b, "self edges are not allowed");
    require(seen.insert(std::minmax(e.a, e.b)).second, "duplicate edge");
  }
}

Adjacency::Adjacency(std::size_t n, std::span<const Edge> edges) : offsets_(n + 1, 0) {
  for (const Edge& e : edges) {
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges) {
    targets_[fill[e.a]++] = e.b;
    targets_[fill[e.b]++] = e.a;
  }
}

void Adjacency::neighbour_sums(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = sites();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += x[targets_[k]];
    out[i] = s;
  }
}

}  // namespace srs
