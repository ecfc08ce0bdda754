#pragma once

#include <cstddef>
#include <functional>

namespace depcov {

// Process-wide cap on worker threads. Defaults to DEPCOV_THREADS when set,
// otherwise the hardware concurrency.
std::size_t thread_limit();
void set_thread_limit(std::size_t threads);
void reset_thread_limit();

// Runs body(i) for i in [0, count). Each index must write only to its own
// output slot; results are then independent of the thread count. Calls made
// from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace depcov
