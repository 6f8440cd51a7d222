#pragma once

#include <cstddef>
#include <functional>

namespace mmrkit {

/// Worker count: MMRKIT_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(i) for i in [0, n), spread over worker_count() threads. Each
/// index is handled exactly once, so writing results into slot i keeps the
/// output independent of scheduling. The first exception thrown (by index)
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mmrkit
