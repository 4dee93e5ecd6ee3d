#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace steinmc {

// Runs fn(i) for i in [0, count) across `workers` threads.  Each index is
// processed exactly once and fn must only write to per-index slots, so the
// outcome is identical for any worker count.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

// Order-independent summation: fixed pairwise tree over the slots.
double pairwise_sum(std::span<const double> values);

}  // namespace steinmc
