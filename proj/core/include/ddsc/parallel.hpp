#pragma once

#include <cstddef>
#include <functional>

namespace ddsc {

/// Worker cap: DDSC_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Indices are split into contiguous
/// chunks, one per worker; body must not touch shared mutable state. The
/// first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ddsc
