#include "coopsim/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coopsim/rng.hpp"

namespace coopsim {

namespace {

struct BoxLocal {
  Vec3 center;  // global
  Mat3 rot_t;   // global -> box local
  Vec3 half;
  double circumradius;
};

// slab test; returns smallest t >= 0 or +inf
double ray_box(const Vec3& origin, const Vec3& dir, const BoxLocal& box) {
  Vec3 o = box.rot_t * (origin - box.center);
  Vec3 d = box.rot_t * dir;
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  const double ov[3] = {o.x, o.y, o.z};
  const double dv[3] = {d.x, d.y, d.z};
  const double hv[3] = {box.half.x, box.half.y, box.half.z};
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(dv[i]) < 1e-15) {
      if (std::fabs(ov[i]) > hv[i]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double inv = 1.0 / dv[i];
    double t1 = (-hv[i] - ov[i]) * inv;
    double t2 = (hv[i] - ov[i]) * inv;
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return std::numeric_limits<double>::infinity();
  }
  return tmin;
}

}  // namespace

PointCloud simulate_lidar(const SensorSpec& sensor, const Pose& sensor_pose,
                          const Scene& scene, std::uint64_t seed) {
  if (sensor.channels < 1 || sensor.range <= 0 ||
      sensor.horizontal_resolution <= 0)
    throw std::invalid_argument("simulate_lidar: invalid sensor spec");

  PointCloud out;
  out.frame = Frame::Ego;
  if (scene.objects.empty()) return out;

  const int ncols =
      std::max(1, static_cast<int>(std::lround(360.0 / sensor.horizontal_resolution)));
  const int nchan = sensor.channels;
  const double lo = sensor.lower_fov * kPi / 180.0;
  const double hi = sensor.upper_fov * kPi / 180.0;

  const Mat3 sensor_rot = rotation(sensor_pose);
  const Vec3 origin{sensor_pose.x, sensor_pose.y, sensor_pose.z};

  std::vector<BoxLocal> boxes(scene.objects.size());
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    boxes[i].center = {o.pose.x, o.pose.y, o.pose.z};
    boxes[i].rot_t = rotation(o.pose).transposed();
    boxes[i].half = o.extent * 0.5;
    boxes[i].circumradius = boxes[i].half.norm();
  }

  // Bucket objects by azimuth column in the sensor's ego frame so each
  // column only tests the boxes it can actually subtend.
  std::vector<std::vector<int>> column_objects(ncols);
  for (size_t i = 0; i < boxes.size(); ++i) {
    Vec3 rel = global_to_ego(boxes[i].center, sensor_pose);
    double d = std::hypot(rel.x, rel.y);
    double reach = rel.norm() - boxes[i].circumradius;
    if (reach > sensor.range) continue;  // fully beyond range
    if (d <= boxes[i].circumradius) {
      for (auto& col : column_objects) col.push_back(static_cast<int>(i));
      continue;
    }
    double az = std::atan2(rel.y, rel.x);
    double halfwin = std::asin(std::min(1.0, boxes[i].circumradius / d));
    int c0 = static_cast<int>(std::floor((az - halfwin) / (2.0 * kPi) * ncols));
    int c1 = static_cast<int>(std::ceil((az + halfwin) / (2.0 * kPi) * ncols));
    for (int c = c0; c <= c1; ++c)
      column_objects[((c % ncols) + ncols) % ncols].push_back(static_cast<int>(i));
  }

  Rng drop_rng = substream(seed, "lidar-drop");
  Rng noise_rng = substream(seed, "lidar-noise");
  const double r0 = sensor.range * (1.0 - sensor.dropoff_intensity);

  for (int col = 0; col < ncols; ++col) {
    const auto& cands = column_objects[col];
    if (cands.empty()) continue;
    double az = 2.0 * kPi * col / ncols;
    double caz = std::cos(az), saz = std::sin(az);
    for (int ch = 0; ch < nchan; ++ch) {
      double el = nchan == 1 ? lo : lo + (hi - lo) * ch / (nchan - 1);
      double cel = std::cos(el), sel = std::sin(el);
      Vec3 dir_ego{cel * caz, cel * saz, sel};
      Vec3 dir = sensor_rot * dir_ego;
      double best = std::numeric_limits<double>::infinity();
      for (int bi : cands) best = std::min(best, ray_box(origin, dir, boxes[bi]));
      if (!(best <= sensor.range)) continue;

      // distance-scaled extra dropoff on top of the general rate
      double extra = 0.0;
      if (sensor.range > r0)
        extra = sensor.dropoff_rate *
                std::clamp((best - r0) / (sensor.range - r0), 0.0, 1.0);
      double survive = (1.0 - sensor.dropoff_rate) * (1.0 - extra);
      if (drop_rng.uniform() >= survive) continue;

      Vec3 p = dir_ego * best;
      p.x += sensor.noise_std * noise_rng.normal();
      p.y += sensor.noise_std * noise_rng.normal();
      p.z += sensor.noise_std * noise_rng.normal();
      out.points.push_back(p);
    }
  }
  return out;
}

PointCloud transform_to_grc(const PointCloud& cloud, const Pose& ego_pose) {
  if (cloud.frame != Frame::Ego)
    throw std::invalid_argument("transform_to_grc: cloud already in global frame");
  PointCloud out;
  out.frame = Frame::Global;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(ego_to_global(p, ego_pose));
  return out;
}

int points_on_object(const PointCloud& cloud, const GroundTruthObject& object,
                     double margin) {
  Mat3 rot_t = rotation(object.pose).transposed();
  Vec3 center{object.pose.x, object.pose.y, object.pose.z};
  Vec3 half = object.extent * 0.5;
  int count = 0;
  for (const auto& p : cloud.points) {
    Vec3 l = rot_t * (p - center);
    if (std::fabs(l.x) <= half.x + margin && std::fabs(l.y) <= half.y + margin &&
        std::fabs(l.z) <= half.z + margin)
      ++count;
  }
  return count;
}

}  // namespace coopsim
