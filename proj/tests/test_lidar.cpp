#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "coopsim/lidar.hpp"

using namespace coopsim;

namespace {

Scene single_object_scene(double x, double y, Vec3 extent,
                          ObjectClass cls = ObjectClass::Car) {
  Scene s;
  s.bounds = {-500, -500, 1000, 1000};
  GroundTruthObject o;
  o.id = 0;
  o.cls = cls;
  o.pose = {x, y, extent.z * 0.5, 0, 0, 0};
  o.extent = extent;
  s.objects.push_back(o);
  return s;
}

SensorSpec clean_sensor() {
  SensorSpec s;
  s.noise_std = 0.0;
  s.dropoff_rate = 0.0;
  s.dropoff_intensity = 0.0;
  return s;
}

}  // namespace

TEST_CASE("object beyond sensing range returns no points") {
  SensorSpec sensor = clean_sensor();
  Scene s = single_object_scene(150.0, 0.0, {4.5, 2.0, 1.6});
  PointCloud cloud = simulate_lidar(sensor, Pose{0, 0, 1.74}, s, 1);
  CHECK(cloud.points.empty());
}

TEST_CASE("empty scene gives an empty cloud") {
  Scene s;
  PointCloud cloud = simulate_lidar(SensorSpec{}, Pose{0, 0, 1.74}, s, 1);
  CHECK(cloud.points.empty());
  CHECK(cloud.frame == Frame::Ego);
}

TEST_CASE("wall dropoff fraction sits within 3-sigma binomial bounds") {
  Scene s = single_object_scene(15.0, 0.0, {0.4, 30.0, 12.0});
  Pose pose{0, 0, 1.74};

  SensorSpec no_drop = clean_sensor();
  std::size_t raw_hits = simulate_lidar(no_drop, pose, s, 7).points.size();
  REQUIRE(raw_hits > 1000);

  SensorSpec dropping = no_drop;
  dropping.dropoff_rate = 0.45;
  dropping.dropoff_intensity = 0.0;  // wall is near; isolate the general rate
  std::size_t kept = simulate_lidar(dropping, pose, s, 7).points.size();

  double p = 0.55;
  double mean = p * static_cast<double>(raw_hits);
  double sigma = std::sqrt(static_cast<double>(raw_hits) * p * (1 - p));
  CHECK(static_cast<double>(kept) > mean - 3 * sigma);
  CHECK(static_cast<double>(kept) < mean + 3 * sigma);
}

TEST_CASE("nearer box occludes the farther one on shared rays") {
  Scene s = single_object_scene(20.0, 0.0, {2.0, 12.0, 12.0});
  GroundTruthObject far;
  far.id = 1;
  far.cls = ObjectClass::Car;
  far.pose = {40.0, 0.0, 1.0, 0, 0, 0};
  far.extent = {4.0, 4.0, 2.0};  // entirely inside the near box's shadow
  s.objects.push_back(far);

  PointCloud cloud = simulate_lidar(clean_sensor(), Pose{0, 0, 2.0}, s, 3);
  PointCloud global = transform_to_grc(cloud, Pose{0, 0, 2.0});
  CHECK(points_on_object(global, far, 0.0) == 0);
  CHECK(points_on_object(global, s.objects[0], 1e-6) ==
        static_cast<int>(cloud.points.size()));
}

TEST_CASE("pre-noise points respect range and vertical field of view") {
  SensorSpec sensor = clean_sensor();
  sensor.lower_fov = -10.0;
  sensor.upper_fov = 5.0;
  Scene s = single_object_scene(30.0, 5.0, {6.0, 6.0, 40.0});
  PointCloud cloud = simulate_lidar(sensor, Pose{0, 0, 1.74}, s, 11);
  REQUIRE_FALSE(cloud.points.empty());
  for (const auto& p : cloud.points) {
    double r = p.norm();
    CHECK(r <= sensor.range + 1e-9);
    double el = std::asin(p.z / r) * 180.0 / kPi;
    CHECK(el >= sensor.lower_fov - 1e-9);
    CHECK(el <= sensor.upper_fov + 1e-9);
  }
}

TEST_CASE("simulation is bit-identical for fixed inputs") {
  SceneConfig cfg;
  cfg.num_cars = 8;
  cfg.num_pedestrians = 5;
  Scene s = generate_scene(cfg, 21);
  Pose pose{30, 40, 1.74, 0, 0, 0.3};
  PointCloud a = simulate_lidar(SensorSpec{}, pose, s, 77);
  PointCloud b = simulate_lidar(SensorSpec{}, pose, s, 77);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
}

TEST_CASE("transform_to_grc rejects global input and round-trips") {
  PointCloud cloud;
  cloud.frame = Frame::Global;
  CHECK_THROWS_AS(transform_to_grc(cloud, Pose{}), std::invalid_argument);

  cloud.frame = Frame::Ego;
  cloud.points = {{1, 0, 0}, {0, 2, 0}};
  Pose pose{1, 2, 3, 0, 0, kPi / 2};
  PointCloud g = transform_to_grc(cloud, pose);
  CHECK(g.frame == Frame::Global);
  CHECK(std::fabs(g.points[0].x - 1.0) < 1e-12);
  CHECK(std::fabs(g.points[0].y - 3.0) < 1e-12);
}

TEST_CASE("points_on_object matches a brute-force containment scan") {
  SceneConfig cfg;
  cfg.num_cars = 10;
  cfg.num_pedestrians = 6;
  Scene s = generate_scene(cfg, 13);
  Pose pose{100, 40, 4.74};
  SensorSpec sensor = infrastructure_sensor();
  PointCloud global = transform_to_grc(simulate_lidar(sensor, pose, s, 5), pose);

  for (const auto& obj : s.objects) {
    // independent oracle: explicit corner-frame check per point
    Mat3 rot = rotation(obj.pose);
    Mat3 inv = rot.transposed();
    int expected = 0;
    for (const auto& p : global.points) {
      Vec3 l = inv * (p - Vec3{obj.pose.x, obj.pose.y, obj.pose.z});
      double margin = 3 * sensor.noise_std;
      if (std::fabs(l.x) <= obj.extent.x / 2 + margin &&
          std::fabs(l.y) <= obj.extent.y / 2 + margin &&
          std::fabs(l.z) <= obj.extent.z / 2 + margin)
        ++expected;
    }
    CHECK(points_on_object(global, obj, 3 * sensor.noise_std) == expected);
  }

  PointCloud empty;
  empty.frame = Frame::Global;
  CHECK(points_on_object(empty, s.objects[0]) == 0);
}

TEST_CASE("seven constructed interior points count as seven") {
  GroundTruthObject obj;
  obj.pose = {10, 10, 1, 0, 0, 0.5};
  obj.extent = {4, 2, 2};
  PointCloud cloud;
  cloud.frame = Frame::Global;
  Mat3 rot = rotation(obj.pose);
  for (int i = 0; i < 7; ++i) {
    Vec3 local{-1.5 + 0.5 * i, 0.2, 0.1};
    cloud.points.push_back(rot * local + Vec3{10, 10, 1});
  }
  CHECK(points_on_object(cloud, obj, 0.0) == 7);
}
