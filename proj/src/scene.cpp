#include "coopsim/scene.hpp"

#include <stdexcept>

#include "coopsim/rng.hpp"

namespace coopsim {

namespace {

bool overlaps(const GroundTruthObject& a, const GroundTruthObject& b) {
  // conservative circle test on footprint circumradii
  double ra = 0.5 * std::hypot(a.extent.x, a.extent.y);
  double rb = 0.5 * std::hypot(b.extent.x, b.extent.y);
  double d = std::hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y);
  return d < ra + rb;
}

bool inside_bounds(const GroundTruthObject& o, const SceneBounds& b) {
  double r = 0.5 * std::hypot(o.extent.x, o.extent.y);
  return o.pose.x - r >= b.min_x && o.pose.x + r <= b.min_x + b.size_x &&
         o.pose.y - r >= b.min_y && o.pose.y + r <= b.min_y + b.size_y;
}

}  // namespace

Scene generate_scene(const SceneConfig& config, std::uint64_t seed) {
  if (config.num_cars < 0 || config.num_pedestrians < 0)
    throw std::invalid_argument("generate_scene: negative object count");

  Scene scene;
  scene.bounds = config.bounds;
  Rng rng = substream(seed, "scene");

  int total = config.num_cars + config.num_pedestrians;
  scene.objects.reserve(total);
  for (int i = 0; i < total; ++i) {
    bool is_car = i < config.num_cars;
    const Vec3& nominal = is_car ? config.car_extent : config.pedestrian_extent;

    GroundTruthObject obj;
    obj.id = i;
    obj.cls = is_car ? ObjectClass::Car : ObjectClass::Pedestrian;

    bool placed = false;
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
      double scale = 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
      obj.extent = {nominal.x * scale, nominal.y * scale, nominal.z * scale};
      double m = config.placement_margin + 0.5 * std::hypot(obj.extent.x, obj.extent.y);
      obj.pose.x = rng.uniform(config.bounds.min_x + m,
                               config.bounds.min_x + config.bounds.size_x - m);
      obj.pose.y = rng.uniform(config.bounds.min_y + m,
                               config.bounds.min_y + config.bounds.size_y - m);
      obj.pose.z = obj.extent.z * 0.5;
      obj.pose.yaw = wrap_angle(rng.uniform(0.0, 2.0 * kPi));

      bool clash = false;
      for (const auto& other : scene.objects)
        if (overlaps(obj, other)) {
          clash = true;
          break;
        }
      if (!clash && inside_bounds(obj, config.bounds)) {
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "generate_scene: could not place object " + std::to_string(i) +
          " after " + std::to_string(config.max_retries) + " attempts");
    scene.objects.push_back(obj);
  }
  return scene;
}

}  // namespace coopsim
