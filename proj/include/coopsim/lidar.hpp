#pragma once

#include <cstdint>
#include <vector>

#include "coopsim/geometry.hpp"
#include "coopsim/scene.hpp"

namespace coopsim {

enum class Frame { Ego, Global };

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::Ego;
};

struct SensorSpec {
  int channels = 64;
  double mount_height = 1.74;  // 4.74 for infrastructure
  double range = 100.0;
  double rotation_hz = 10.0;
  double upper_fov = 22.5;  // degrees
  double lower_fov = -22.5;
  double noise_std = 0.01;
  double dropoff_rate = 0.45;
  double dropoff_intensity = 0.8;
  double horizontal_resolution = 0.4;  // degrees per column
};

inline SensorSpec vehicle_sensor() { return SensorSpec{}; }
inline SensorSpec infrastructure_sensor() {
  SensorSpec s;
  s.mount_height = 4.74;
  s.upper_fov = 0.0;
  return s;
}

// Casts channels x (360/horizontal_resolution) rays against the scene's
// oriented boxes, nearest hit wins. Hits are dropped with the general
// dropoff rate plus a distance-scaled term, survivors get isotropic
// Gaussian noise. Output is in the sensor's ego frame.
PointCloud simulate_lidar(const SensorSpec& sensor, const Pose& sensor_pose,
                          const Scene& scene, std::uint64_t seed);

// Rigid transform into the shared global frame: R_X * R_Y * R_Z rotation
// then translation.
PointCloud transform_to_grc(const PointCloud& cloud, const Pose& ego_pose);

// Counts cloud points inside the object's oriented box expanded by a noise
// margin (3 sigma of the sensor noise by default). Cloud must be global.
int points_on_object(const PointCloud& cloud, const GroundTruthObject& object,
                     double margin = 0.03);

}  // namespace coopsim
