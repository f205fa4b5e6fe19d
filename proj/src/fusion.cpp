#include "coopsim/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coopsim/rng.hpp"

namespace coopsim {

PointCloud early_fuse(const std::vector<PointCloud>& clouds) {
  PointCloud out;
  out.frame = Frame::Global;
  for (const auto& c : clouds) {
    if (c.frame != Frame::Global)
      throw std::invalid_argument("early_fuse: all clouds must be global frame");
    out.points.insert(out.points.end(), c.points.begin(), c.points.end());
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const Vec3& a, const Vec3& b) {
              return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
            });
  return out;
}

FeatureDeck intermediate_fuse(const std::vector<FeatureDeck>& decks, int owner) {
  return deck_union(decks, owner);
}

std::vector<Detection> surrogate_detect(const FeatureDeck& fused,
                                        const Scene& scene,
                                        const DetectorParams& params,
                                        std::uint64_t seed, int source_node) {
  std::vector<Detection> out;
  if (fused.cells.empty()) return out;

  const double cell_diag = std::hypot(fused.grid.cell_dx, fused.grid.cell_dy);

  for (const auto& obj : scene.objects) {
    OrientedRect fp = obj.footprint();
    std::int64_t m = 0;
    for (const auto& c : fused.cells)
      if (fp.contains(fused.grid.center_x(c.ix), fused.grid.center_y(c.iy),
                      cell_diag))
        m += c.point_count;
    if (m < params.min_points) continue;

    // unit draws keyed by object only, so a larger m always shrinks the
    // realized error instead of rerolling it
    Rng rng = substream(seed, "detect", static_cast<std::uint64_t>(obj.id));
    double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    Detection d;
    d.cls = obj.cls;
    d.center = {obj.pose.x + params.base_jitter * inv_sqrt_m * rng.normal(),
                obj.pose.y + params.base_jitter * inv_sqrt_m * rng.normal(),
                obj.pose.z + params.base_jitter * inv_sqrt_m * rng.normal()};
    d.extent = obj.extent;
    d.yaw = wrap_angle(obj.pose.yaw + params.yaw_jitter * inv_sqrt_m * rng.normal());
    d.score = static_cast<double>(m) / (static_cast<double>(m) + params.score_halfpoint);
    d.source_node = source_node;
    out.push_back(d);
  }

  if (params.clutter_enabled && params.clutter_rate > 0) {
    Rng rng = substream(seed, "clutter");
    double lambda = params.clutter_rate * static_cast<double>(fused.cells.size()) / 100.0;
    int n_clutter = rng.poisson(lambda);
    for (int i = 0; i < n_clutter; ++i) {
      const auto& cell = fused.cells[rng.below(fused.cells.size())];
      Detection d;
      d.cls = rng.uniform() < 0.5 ? ObjectClass::Car : ObjectClass::Pedestrian;
      d.extent = d.cls == ObjectClass::Car ? Vec3{4.5, 2.0, 1.6} : Vec3{0.5, 0.5, 1.8};
      d.center = {fused.grid.center_x(cell.ix), fused.grid.center_y(cell.iy),
                  d.extent.z * 0.5};
      d.yaw = wrap_angle(rng.uniform(0.0, 2.0 * kPi));
      d.score = rng.uniform(0.0, 0.3);
      d.source_node = source_node;
      out.push_back(d);
    }
  }
  return out;
}

std::vector<Detection> circle_nms(const std::vector<Detection>& detections,
                                  const NmsConfig& config) {
  std::vector<std::size_t> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = detections[a];
    const auto& db = detections[b];
    if (da.score != db.score) return da.score > db.score;
    return std::tie(da.center.x, da.center.y, da.center.z) <
           std::tie(db.center.x, db.center.y, db.center.z);
  });

  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const auto& d = detections[idx];
    auto it = config.radius_per_class.find(d.cls);
    double radius = it != config.radius_per_class.end() ? it->second : 0.0;
    if (radius <= 0)
      throw std::invalid_argument("circle_nms: missing or non-positive class radius");
    bool suppressed = false;
    for (const auto& k : kept) {
      if (k.cls != d.cls) continue;
      double dist = std::hypot(k.center.x - d.center.x, k.center.y - d.center.y);
      if (dist < radius) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace coopsim
