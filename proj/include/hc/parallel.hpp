#pragma once

#include <cstddef>
#include <functional>

namespace hc {

/// Worker count: `HC_THREADS` if set (>= 1), else hardware concurrency.
std::size_t default_worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome never depends on scheduling. The first exception thrown by any
/// task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

} // namespace hc
