#pragma once

#include <cstddef>
#include <functional>

namespace segred {

/// Resolves a worker-count request: values <= 0 mean available parallelism.
int resolve_workers(int requested) noexcept;

/// Runs body(begin, end) over [0, count) in dynamically scheduled chunks on
/// at most `workers` threads (the caller participates). Blocks until every
/// chunk has finished; the first exception thrown by a chunk is rethrown.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace segred
