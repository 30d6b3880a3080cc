#pragma once

#include <cstddef>
#include <functional>

namespace bwf {

/// Worker count: hardware concurrency capped by the BWF_NUM_THREADS
/// environment variable (values < 1 mean serial execution).
std::size_t max_threads();

/// Runs fn(0..count-1). Work items must be independent; each item writes only
/// to its own output slot, so results are identical for any schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace bwf
