#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "coopsim/dfs.hpp"

using namespace coopsim;

namespace {

FeatureDeck make_deck(const std::vector<FeatureCell>& cells) {
  FeatureDeck d;
  d.grid.origin_x = 0;
  d.grid.origin_y = 0;
  d.grid.cell_dx = 1.0;
  d.grid.cell_dy = 1.0;
  d.grid.nx = 100;
  d.grid.ny = 100;
  d.owner = 0;
  d.cells = cells;
  std::sort(d.cells.begin(), d.cells.end(),
            [](const FeatureCell& a, const FeatureCell& b) {
              return std::pair(a.ix, a.iy) < std::pair(b.ix, b.iy);
            });
  return d;
}

FeatureDeck line_deck(int n) {
  std::vector<FeatureCell> cells;
  for (int i = 0; i < n; ++i) cells.push_back({i, 0, 1, 0});
  return make_deck(cells);
}

std::set<std::pair<int, int>> cell_set(const FeatureDeck& d) {
  std::set<std::pair<int, int>> s;
  for (const auto& c : d.cells) s.insert({c.ix, c.iy});
  return s;
}

// independent priority ordering for the oracle checks
std::vector<std::pair<double, std::pair<int, int>>> sorted_priorities(
    const FeatureDeck& d, double sx, double sy) {
  std::vector<std::pair<double, std::pair<int, int>>> v;
  for (const auto& c : d.cells)
    v.push_back({std::fabs(d.grid.center_x(c.ix) - sx) +
                     std::fabs(d.grid.center_y(c.iy) - sy),
                 {c.ix, c.iy}});
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("budget_to_cells floors bytes over the 256-byte cell payload") {
  CHECK(budget_to_cells(7'680'000) == 30'000);
  CHECK(budget_to_cells(8'960'000) == 35'000);
  CHECK(budget_to_cells(255) == 0);
  CHECK(budget_to_cells(256) == 1);
  CHECK(budget_to_cells(511) == 1);
  CHECK(budget_to_cells(0) == 0);
  CHECK_THROWS_AS(budget_to_cells(-1), std::invalid_argument);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {FilterStrategy::TopKNearest, FilterStrategy::TopKFarthest,
                 FilterStrategy::RandomVoxel, FilterStrategy::RandomPriority})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_FALSE(strategy_from_string("bogus").has_value());
}

TEST_CASE("manhattan priority is the L1 distance to the sensor") {
  CHECK(manhattan_priority(3.0, 4.0, 1.0, 1.0) == 5.0);
  CHECK(manhattan_priority(-2.0, 0.0, 2.0, -1.0) == 5.0);
  CHECK(manhattan_priority(7.5, 7.5, 7.5, 7.5) == 0.0);
}

TEST_CASE("top-k strategies pick exactly the nearest / farthest halves") {
  // cells at x = 0..5 on one row, sensor at the left end; centers are
  // x + 0.5 so priorities are strictly increasing in ix
  FeatureDeck deck = line_deck(6);
  FeatureDeck near = sift(deck, FilterStrategy::TopKNearest, 3, 0.0, 0.5, 1);
  FeatureDeck far = sift(deck, FilterStrategy::TopKFarthest, 3, 0.0, 0.5, 1);
  CHECK(cell_set(near) == std::set<std::pair<int, int>>{{0, 0}, {1, 0}, {2, 0}});
  CHECK(cell_set(far) == std::set<std::pair<int, int>>{{3, 0}, {4, 0}, {5, 0}});
}

TEST_CASE("decks at or under budget pass through unchanged") {
  FeatureDeck deck = line_deck(5);
  for (auto s : {FilterStrategy::TopKNearest, FilterStrategy::TopKFarthest,
                 FilterStrategy::RandomVoxel, FilterStrategy::RandomPriority}) {
    CHECK(sift(deck, s, 5, 0, 0, 9).cells == deck.cells);
    CHECK(sift(deck, s, 100, 0, 0, 9).cells == deck.cells);
  }
}

TEST_CASE("sift output is a sorted K-subset of the input") {
  FeatureDeck deck = line_deck(97);
  auto in = cell_set(deck);
  for (auto s : {FilterStrategy::TopKNearest, FilterStrategy::TopKFarthest,
                 FilterStrategy::RandomVoxel, FilterStrategy::RandomPriority}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      FeatureDeck out = sift(deck, s, 31, 10.0, 3.0, seed);
      CHECK(out.cells.size() == 31);
      auto picked = cell_set(out);
      CHECK(picked.size() == 31);  // no duplicates
      for (const auto& c : picked) CHECK(in.count(c) == 1);
      for (size_t i = 1; i < out.cells.size(); ++i)
        CHECK(std::pair(out.cells[i - 1].ix, out.cells[i - 1].iy) <
              std::pair(out.cells[i].ix, out.cells[i].iy));
    }
  }
}

TEST_CASE("stratified sampling keeps one cell per distance stratum") {
  // 10 cells, K = 3: strata sizes 4, 3, 3 over the distance-sorted order
  FeatureDeck deck = line_deck(10);
  auto ranked = sorted_priorities(deck, 0.0, 0.5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    FeatureDeck out = sift(deck, FilterStrategy::RandomPriority, 3, 0.0, 0.5,
                           seed);
    REQUIRE(out.cells.size() == 3);
    auto picked = cell_set(out);
    // exactly one pick from ranks [0,4), [4,7), [7,10)
    int per_stratum[3] = {0, 0, 0};
    for (int r = 0; r < 10; ++r) {
      if (!picked.count(ranked[r].second)) continue;
      int s = r < 4 ? 0 : (r < 7 ? 1 : 2);
      ++per_stratum[s];
    }
    CHECK(per_stratum[0] == 1);
    CHECK(per_stratum[1] == 1);
    CHECK(per_stratum[2] == 1);
  }
}

TEST_CASE("stratified picks always cover every distance quantile") {
  // with K strata the i-th kept cell (by distance rank) must lie inside
  // stratum i, so the max distance-rank of the nearest keep is bounded
  FeatureDeck deck = line_deck(64);
  auto ranked = sorted_priorities(deck, 0.0, 0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FeatureDeck out = sift(deck, FilterStrategy::RandomPriority, 8, 0.0, 0.5,
                           seed);
    auto picked = cell_set(out);
    std::vector<int> keep_ranks;
    for (int r = 0; r < 64; ++r)
      if (picked.count(ranked[r].second)) keep_ranks.push_back(r);
    REQUIRE(keep_ranks.size() == 8);
    for (int s = 0; s < 8; ++s) {
      CHECK(keep_ranks[s] >= s * 8);
      CHECK(keep_ranks[s] < (s + 1) * 8);
    }
  }
}

TEST_CASE("uniform-rank variant is not stratified in general") {
  // with enough seeds the plain uniform variant must produce at least one
  // draw that skips an entire stratum, which the stratified default never does
  FeatureDeck deck = line_deck(40);
  auto ranked = sorted_priorities(deck, 0.0, 0.5);
  SiftOptions uniform;
  uniform.rpf_uniform_ranks = true;
  bool saw_empty_stratum = false;
  for (std::uint64_t seed = 0; seed < 200 && !saw_empty_stratum; ++seed) {
    FeatureDeck out =
        sift(deck, FilterStrategy::RandomPriority, 4, 0.0, 0.5, seed, uniform);
    auto picked = cell_set(out);
    int per_stratum[4] = {0, 0, 0, 0};
    for (int r = 0; r < 40; ++r)
      if (picked.count(ranked[r].second)) ++per_stratum[r / 10];
    for (int s = 0; s < 4; ++s)
      if (per_stratum[s] == 0) saw_empty_stratum = true;
  }
  CHECK(saw_empty_stratum);
}

TEST_CASE("random strategies are deterministic per seed") {
  FeatureDeck deck = line_deck(50);
  for (auto s : {FilterStrategy::RandomVoxel, FilterStrategy::RandomPriority}) {
    FeatureDeck a = sift(deck, s, 12, 5.0, 5.0, 42);
    FeatureDeck b = sift(deck, s, 12, 5.0, 5.0, 42);
    CHECK(a.cells == b.cells);
    FeatureDeck c = sift(deck, s, 12, 5.0, 5.0, 43);
    // different seeds should usually differ; just check it's still valid
    CHECK(c.cells.size() == 12);
  }
}

TEST_CASE("K of zero yields an empty deck and negative K throws") {
  FeatureDeck deck = line_deck(10);
  for (auto s : {FilterStrategy::TopKNearest, FilterStrategy::TopKFarthest,
                 FilterStrategy::RandomVoxel, FilterStrategy::RandomPriority}) {
    FeatureDeck out = sift(deck, s, 0, 0, 0, 1);
    CHECK(out.cells.empty());
    CHECK(out.grid == deck.grid);
    CHECK_THROWS_AS(sift(deck, s, -1, 0, 0, 1), std::invalid_argument);
  }
}
