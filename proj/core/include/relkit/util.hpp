#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace relkit {

/// Deterministic Fisher-Yates shuffle on indices; std::shuffle is not pinned
/// down by the standard, this is.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be
/// written to pre-sized slots so the output order never depends on
/// scheduling.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace relkit
