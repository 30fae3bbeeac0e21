#pragma once

#include <cstddef>
#include <functional>

namespace sosaf {

/// Upper bound on worker threads used by parallel_for. 0 restores the
/// default (hardware concurrency).
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs fn(i) for i in [0, n) over contiguous static chunks. Each index must
/// write only its own outputs; results are then independent of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace sosaf
