#pragma once

#include <cstddef>
#include <functional>

namespace srs {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// default (hardware concurrency).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(block) for block in [0, n_blocks). Blocks are distributed over
/// the worker threads; the block partition never depends on the thread count,
/// so per-block results are reproducible.
void parallel_for(std::size_t n_blocks, const std::function<void(std::size_t)>& body);

/// Half-open index range of block `b` when `n` items are split into `n_blocks`.
struct BlockRange {
  std::size_t begin;
  std::size_t end;
};
BlockRange block_range(std::size_t n, std::size_t n_blocks, std::size_t b);

}  // namespace srs
