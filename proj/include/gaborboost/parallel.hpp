#pragma once

#include <cstddef>
#include <functional>

namespace gaborboost {

// Worker count from GABORBOOST_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

// Runs fn(i) for i in [0, n) across up to thread_count() threads. Each index
// is visited exactly once; callers write results into slot i so output
// order never depends on scheduling. The first exception thrown by any
// task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gaborboost
