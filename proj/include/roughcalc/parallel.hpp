#pragma once

#include <cstddef>
#include <functional>

namespace roughcalc {

// Worker cap from ROUGHCALC_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs task(i) for i in [0, n) across up to worker_count() threads. Tasks
// must write only to their own slot; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace roughcalc
