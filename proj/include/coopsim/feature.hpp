#pragma once

#include <cstdint>
#include <vector>

#include "coopsim/lidar.hpp"

namespace coopsim {

inline constexpr int kCellPayloadBytes = 256;

struct VoxelGridSpec {
  double origin_x = 0, origin_y = 0;
  double cell_dx = 0.23, cell_dy = 0.23, cell_dz = 8.0;
  int nx = 0, ny = 0;

  bool operator==(const VoxelGridSpec& o) const = default;

  double center_x(int ix) const { return origin_x + (ix + 0.5) * cell_dx; }
  double center_y(int iy) const { return origin_y + (iy + 0.5) * cell_dy; }
};

// Grid covering the scene bounds, anchored at their min corner so every
// node voxelizes onto the same global lattice.
VoxelGridSpec grid_for_bounds(const SceneBounds& bounds, double cell_dx = 0.23,
                              double cell_dy = 0.23, double cell_dz = 8.0);

struct FeatureCell {
  int ix = 0, iy = 0;
  int point_count = 0;  // >= 1, empty cells are not stored
  int source_node = -1;

  bool operator==(const FeatureCell& o) const = default;
};

// Occupied cells of one node for one frame. Cells are kept sorted by
// (ix, iy) as the canonical order; at most one cell per index.
struct FeatureDeck {
  VoxelGridSpec grid;
  std::vector<FeatureCell> cells;
  int owner = -1;

  std::size_t size() const { return cells.size(); }
  std::int64_t payload_bytes() const {
    return static_cast<std::int64_t>(cells.size()) * kCellPayloadBytes;
  }
};

// Maps each global-frame point to its (floor) cell index; z is collapsed
// into the single slab. Points outside the grid extent are discarded.
FeatureDeck voxelize(const PointCloud& cloud, const VoxelGridSpec& grid,
                     int owner);

// Index-wise union; point counts sum; the merged deck is owned by `owner`.
// All decks must share the same grid.
FeatureDeck deck_union(const std::vector<FeatureDeck>& decks, int owner);

}  // namespace coopsim
