#pragma once

#include <cstddef>
#include <functional>

namespace lpplab {

// LPP_LAB_THREADS when set to a positive integer, otherwise hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, count) on up to `workers` threads (0 selects worker_count()).
// Work is claimed dynamically; callers write results by index so output does not depend
// on scheduling. The first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace lpplab
