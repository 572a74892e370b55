#pragma once

#include <cstddef>
#include <functional>

namespace clustclass {

// Number of worker threads to use: CLUSTCLASS_THREADS when set to a positive
// integer, otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots so the outcome does not depend on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace clustclass
