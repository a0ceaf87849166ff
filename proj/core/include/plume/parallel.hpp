#pragma once

#include <cstddef>
#include <functional>

namespace plume {

/// Global cap on worker threads used by every stage. 0 means "hardware concurrency".
void set_thread_count(unsigned count);
[[nodiscard]] unsigned thread_count();

/// Runs `body(i)` for every i in [0, n), splitting the range into contiguous blocks across
/// worker threads. Callers must write results into per-index slots so that the outcome does
/// not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace plume
