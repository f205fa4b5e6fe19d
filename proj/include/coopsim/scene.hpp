#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coopsim/geometry.hpp"

namespace coopsim {

enum class ObjectClass { Car, Pedestrian };

inline const char* to_string(ObjectClass c) {
  return c == ObjectClass::Car ? "car" : "pedestrian";
}

struct GroundTruthObject {
  int id = 0;
  ObjectClass cls = ObjectClass::Car;
  Pose pose;
  Vec3 extent;  // length, width, height

  OrientedRect footprint() const {
    return {pose.x, pose.y, extent.x * 0.5, extent.y * 0.5, pose.yaw};
  }
};

struct SceneBounds {
  double min_x = 0, min_y = 0;
  double size_x = 280.0, size_y = 80.0;  // three-intersection corridor
};

struct Scene {
  std::vector<GroundTruthObject> objects;
  SceneBounds bounds;
  int frame_index = 0;
};

struct SceneConfig {
  int num_cars = 0;
  int num_pedestrians = 0;
  SceneBounds bounds;
  // nominal extents, each perturbed a few percent per object
  Vec3 car_extent{4.5, 2.0, 1.6};
  Vec3 pedestrian_extent{0.5, 0.5, 1.8};
  double placement_margin = 1.0;  // clearance from bounds edge
  int max_retries = 1000;
};

// Rejection-samples non-overlapping objects. Deterministic per (config, seed).
// Throws std::runtime_error when placement fails after max_retries attempts.
Scene generate_scene(const SceneConfig& config, std::uint64_t seed);

}  // namespace coopsim
