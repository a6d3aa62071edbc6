#pragma once

#include <cstddef>
#include <functional>

namespace qdnls {

/// Worker cap: QDNLS_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into slot i, so the gather
/// order is fixed. The first exception thrown is rethrown after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qdnls
