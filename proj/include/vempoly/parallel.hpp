#pragma once

#include <cstddef>
#include <functional>

namespace vempoly {

/// Number of worker threads: VEMPOLY_THREADS if set, else hardware concurrency.
std::size_t thread_budget();

/// Runs fn(start, end) over a partition of [0, n) on up to thread_budget()
/// threads. Chunks are contiguous, so callers that write result slot i from
/// iteration i get deterministic output regardless of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace vempoly
