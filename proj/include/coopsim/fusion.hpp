#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "coopsim/feature.hpp"
#include "coopsim/scene.hpp"

namespace coopsim {

struct Detection {
  ObjectClass cls = ObjectClass::Car;
  Vec3 center;
  Vec3 extent;  // l, w, h
  double yaw = 0;
  double score = 0;  // in [0, 1]
  int source_node = -1;

  OrientedRect footprint() const {
    return {center.x, center.y, extent.x * 0.5, extent.y * 0.5, yaw};
  }
  bool operator==(const Detection& o) const = default;
};

struct NmsConfig {
  std::map<ObjectClass, double> radius_per_class = {
      {ObjectClass::Car, 2.0}, {ObjectClass::Pedestrian, 0.5}};
};

struct DetectorParams {
  int min_points = 1;
  double score_halfpoint = 10.0;
  double base_jitter = 0.4;   // meters, per axis, scaled by 1/sqrt(m)
  double yaw_jitter = 0.1;    // radians, scaled by 1/sqrt(m)
  double clutter_rate = 0.05;  // expected false detections per 100 occupied cells
  bool clutter_enabled = true;
};

// Multiset union of global-frame clouds, canonicalized by lexicographic sort.
PointCloud early_fuse(const std::vector<PointCloud>& clouds);

// Deck union under a fusion-stage name; mirrors the pipeline position of
// feature-level fusion.
FeatureDeck intermediate_fuse(const std::vector<FeatureDeck>& decks, int owner);

// Density-based stand-in for a learned detector: each ground-truth object
// whose footprint collects m >= min_points fused points yields a detection
// with score m/(m+halfpoint) and box jitter shrinking as 1/sqrt(m).
// Clutter false positives draw from a dedicated RNG stream so the
// true-positive side stays a monotone function of the deck.
std::vector<Detection> surrogate_detect(const FeatureDeck& fused,
                                        const Scene& scene,
                                        const DetectorParams& params,
                                        std::uint64_t seed,
                                        int source_node = -1);

// Greedy per-class suppression by 2D center distance. Kept detections are
// returned unchanged, highest score first (ties by center, lexicographic).
std::vector<Detection> circle_nms(const std::vector<Detection>& detections,
                                  const NmsConfig& config);

}  // namespace coopsim
