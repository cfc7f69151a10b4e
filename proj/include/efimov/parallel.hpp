#pragma once

#include <cstddef>
#include <functional>

namespace efimov {

/// Worker count: EFIMOV_THREADS when set to a positive integer, else the
/// hardware concurrency. Never affects results, only speed.
unsigned worker_count();

/// Calls body(i) for i in [0, count) across worker_count() threads. Each index
/// is visited exactly once; callers write into per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace efimov
