#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "coopsim/feature.hpp"

namespace coopsim {

enum class FilterStrategy {
  TopKNearest,
  TopKFarthest,
  RandomVoxel,
  RandomPriority,
};

std::string to_string(FilterStrategy s);
std::optional<FilterStrategy> strategy_from_string(const std::string& name);

// Cell priority: Manhattan distance between cell center and sensor.
inline double manhattan_priority(double cx, double cy, double sx, double sy) {
  return std::fabs(cx - sx) + std::fabs(cy - sy);
}

// K = floor(budget / 256 bytes per cell). Negative budgets rejected.
std::int64_t budget_to_cells(std::int64_t budget_bytes);

struct SiftOptions {
  // Plain uniform-rank sampling variant of RandomPriority, kept for
  // comparison against the stratified default.
  bool rpf_uniform_ranks = false;
};

// Truncates a deck to at most K cells under the given strategy. Decks with
// |cells| <= K pass through unchanged for every strategy. Random strategies
// are deterministic per seed; ties in priority break by (ix, iy).
FeatureDeck sift(const FeatureDeck& deck, FilterStrategy strategy,
                 std::int64_t k, double sensor_x, double sensor_y,
                 std::uint64_t seed, const SiftOptions& options = {});

}  // namespace coopsim
