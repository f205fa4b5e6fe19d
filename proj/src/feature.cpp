#include "coopsim/feature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace coopsim {

VoxelGridSpec grid_for_bounds(const SceneBounds& bounds, double cell_dx,
                              double cell_dy, double cell_dz) {
  if (cell_dx <= 0 || cell_dy <= 0 || cell_dz <= 0)
    throw std::invalid_argument("grid_for_bounds: non-positive cell size");
  VoxelGridSpec g;
  g.origin_x = bounds.min_x;
  g.origin_y = bounds.min_y;
  g.cell_dx = cell_dx;
  g.cell_dy = cell_dy;
  g.cell_dz = cell_dz;
  g.nx = static_cast<int>(std::ceil(bounds.size_x / cell_dx));
  g.ny = static_cast<int>(std::ceil(bounds.size_y / cell_dy));
  return g;
}

FeatureDeck voxelize(const PointCloud& cloud, const VoxelGridSpec& grid,
                     int owner) {
  if (cloud.frame != Frame::Global)
    throw std::invalid_argument("voxelize: cloud must be in global frame");

  std::map<std::pair<int, int>, int> counts;
  for (const auto& p : cloud.points) {
    int ix = static_cast<int>(std::floor((p.x - grid.origin_x) / grid.cell_dx));
    int iy = static_cast<int>(std::floor((p.y - grid.origin_y) / grid.cell_dy));
    if (ix < 0 || iy < 0 || ix >= grid.nx || iy >= grid.ny) continue;
    ++counts[{ix, iy}];
  }

  FeatureDeck deck;
  deck.grid = grid;
  deck.owner = owner;
  deck.cells.reserve(counts.size());
  for (const auto& [key, n] : counts)
    deck.cells.push_back({key.first, key.second, n, owner});
  return deck;  // std::map iteration is already (ix, iy)-sorted
}

FeatureDeck deck_union(const std::vector<FeatureDeck>& decks, int owner) {
  FeatureDeck out;
  out.owner = owner;
  if (decks.empty()) return out;
  out.grid = decks.front().grid;

  std::map<std::pair<int, int>, int> counts;
  for (const auto& d : decks) {
    if (!(d.grid == out.grid))
      throw std::invalid_argument("deck_union: mismatched voxel grids");
    for (const auto& c : d.cells) counts[{c.ix, c.iy}] += c.point_count;
  }
  out.cells.reserve(counts.size());
  for (const auto& [key, n] : counts)
    out.cells.push_back({key.first, key.second, n, owner});
  return out;
}

}  // namespace coopsim
