#pragma once

#include <cstddef>
#include <functional>

namespace gdm {

/// Upper bound on worker threads used by library calls. 0 means hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Documents are processed in fixed-size blocks. Reductions combine per-block
/// partials in block order, so results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 256;

inline std::size_t num_blocks(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Runs fn(block_index, begin, end) for every block of [0, n), possibly concurrently.
void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Runs fn(i) for every i in [0, n), possibly concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gdm
