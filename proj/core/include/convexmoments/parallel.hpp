#pragma once

#include <cstddef>
#include <functional>

namespace convexmoments {

/// Worker cap: CONVEXMOMENTS_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_budget();

/// Runs body(i) for i in [0, count). Work is distributed over at most
/// thread_budget() threads; calls nested inside a worker run serially.
/// Each index is processed exactly once, so results written to per-index
/// slots are independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace convexmoments
