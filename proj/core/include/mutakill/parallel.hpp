#pragma once

#include <cstddef>
#include <functional>

namespace mutakill {

/// Worker count for a loop of n independent items: hardware concurrency,
/// capped by the MUTAKILL_THREADS environment variable (0 or unset means
/// auto) and by n itself. Never returns 0.
std::size_t effective_thread_count(std::size_t n_items);

/// Runs fn(0) .. fn(n-1), possibly concurrently in contiguous chunks.
/// fn must tolerate concurrent calls for distinct indices; callers get
/// deterministic results by writing to index i of a pre-sized buffer.
/// The first exception thrown by any chunk is rethrown after all join.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mutakill
