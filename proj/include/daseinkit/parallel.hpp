#pragma once

#include <cstddef>
#include <functional>

namespace daseinkit {

// Worker count: DASEINKIT_THREADS if set to a positive integer, otherwise
// hardware_concurrency (at least 1).
std::size_t thread_count();

// Calls fn(i) for i in [0, n), spread over thread_count() threads. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace daseinkit
