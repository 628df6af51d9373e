#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracop {

// Caps the number of worker threads; 0 restores the hardware default.
void set_max_threads(int threads);
int max_threads();

// Calls body(i) for every i in [0, count). Each index is handled by exactly
// one worker, so writes to per-index slots need no synchronisation.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Fixed-shape tree reduction; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

// Evaluates term(i) in parallel and reduces pairwise in index order, so the
// result is bit-identical for every thread count.
template <class F>
double deterministic_sum(std::size_t count, F&& term) {
  std::vector<double> slots(count, 0.0);
  parallel_for(count, [&](std::size_t i) { slots[i] = term(i); });
  return pairwise_sum(slots);
}

}  // namespace fracop
