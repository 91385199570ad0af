#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srs {

/// Undirected edge between two sites, stored with first < second.
struct Edge {
  std::uint32_t a;
  std::uint32_t b;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Boundary { open, periodic };

/// Nearest-neighbour edges of a hypercubic lattice with row-major site
/// numbering. Periodic wrap edges that would duplicate an existing edge (axis
/// length 2) or form a self loop (axis length 1) are dropped.
std::vector<Edge> lattice_edges(std::span<const std::size_t> shape, Boundary boundary);

/// Compressed adjacency (CSR) built from an edge list over n sites.
class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::size_t n, std::span<const Edge> edges);

  std::size_t sites() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const std::uint32_t> neighbours(std::size_t i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// out[i] = sum of x over the neighbours of i
  void neighbour_sums(std::span<const double> x, std::span<double> out) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

/// Throws unless every edge is within [0, n), not a self loop and unique.
void validate_edges(std::size_t n, std::span<const Edge> edges);

}  // namespace srs
