#include "coopsim/dfs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "coopsim/rng.hpp"

namespace coopsim {

std::string to_string(FilterStrategy s) {
  switch (s) {
    case FilterStrategy::TopKNearest: return "top_k_nearest";
    case FilterStrategy::TopKFarthest: return "top_k_farthest";
    case FilterStrategy::RandomVoxel: return "random_voxel";
    case FilterStrategy::RandomPriority: return "random_priority";
  }
  return "?";
}

std::optional<FilterStrategy> strategy_from_string(const std::string& name) {
  if (name == "top_k_nearest") return FilterStrategy::TopKNearest;
  if (name == "top_k_farthest") return FilterStrategy::TopKFarthest;
  if (name == "random_voxel") return FilterStrategy::RandomVoxel;
  if (name == "random_priority") return FilterStrategy::RandomPriority;
  return std::nullopt;
}

std::int64_t budget_to_cells(std::int64_t budget_bytes) {
  if (budget_bytes < 0)
    throw std::invalid_argument("budget_to_cells: negative budget");
  return budget_bytes / kCellPayloadBytes;
}

FeatureDeck sift(const FeatureDeck& deck, FilterStrategy strategy,
                 std::int64_t k, double sensor_x, double sensor_y,
                 std::uint64_t seed, const SiftOptions& options) {
  if (k < 0) throw std::invalid_argument("sift: negative K");
  const std::int64_t n = static_cast<std::int64_t>(deck.cells.size());
  if (n <= k) return deck;
  if (k == 0) {
    FeatureDeck empty;
    empty.grid = deck.grid;
    empty.owner = deck.owner;
    return empty;
  }

  // cells ordered by (priority, ix, iy) ascending
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> prio(n);
  for (std::int64_t i = 0; i < n; ++i)
    prio[i] = manhattan_priority(deck.grid.center_x(deck.cells[i].ix),
                                 deck.grid.center_y(deck.cells[i].iy),
                                 sensor_x, sensor_y);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (prio[a] != prio[b]) return prio[a] < prio[b];
    if (deck.cells[a].ix != deck.cells[b].ix)
      return deck.cells[a].ix < deck.cells[b].ix;
    return deck.cells[a].iy < deck.cells[b].iy;
  });

  std::vector<std::int64_t> keep;
  keep.reserve(k);
  switch (strategy) {
    case FilterStrategy::TopKNearest:
      keep.assign(order.begin(), order.begin() + k);
      break;
    case FilterStrategy::TopKFarthest:
      keep.assign(order.end() - k, order.end());
      break;
    case FilterStrategy::RandomVoxel: {
      // partial Fisher-Yates over the sorted order
      Rng rng = substream(seed, "sift-random-voxel");
      for (std::int64_t i = 0; i < k; ++i) {
        std::int64_t j = i + static_cast<std::int64_t>(rng.below(n - i));
        std::swap(order[i], order[j]);
        keep.push_back(order[i]);
      }
      break;
    }
    case FilterStrategy::RandomPriority: {
      Rng rng = substream(seed, "sift-random-priority");
      if (options.rpf_uniform_ranks) {
        for (std::int64_t i = 0; i < k; ++i) {
          std::int64_t j = i + static_cast<std::int64_t>(rng.below(n - i));
          std::swap(order[i], order[j]);
          keep.push_back(order[i]);
        }
      } else {
        // one cell per contiguous stratum of the distance-sorted order;
        // the first (n mod k) strata take the extra cell
        std::int64_t base = n / k, extra = n % k, start = 0;
        for (std::int64_t s = 0; s < k; ++s) {
          std::int64_t len = base + (s < extra ? 1 : 0);
          keep.push_back(order[start + static_cast<std::int64_t>(rng.below(len))]);
          start += len;
        }
      }
      break;
    }
  }

  FeatureDeck out;
  out.grid = deck.grid;
  out.owner = deck.owner;
  out.cells.reserve(keep.size());
  for (std::int64_t i : keep) out.cells.push_back(deck.cells[i]);
  std::sort(out.cells.begin(), out.cells.end(),
            [](const FeatureCell& a, const FeatureCell& b) {
              return std::pair(a.ix, a.iy) < std::pair(b.ix, b.iy);
            });
  return out;
}

}  // namespace coopsim
