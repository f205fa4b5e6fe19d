#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace coopsim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3& o) const = default;
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// normalize angle to [-pi, pi)
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

struct Pose {
  double x = 0, y = 0, z = 0;
  double roll = 0, pitch = 0, yaw = 0;

  Pose normalized() const {
    return {x, y, z, wrap_angle(roll), wrap_angle(pitch), wrap_angle(yaw)};
  }
  bool operator==(const Pose& o) const = default;
};

struct Mat3 {
  std::array<double, 9> m{};  // row-major

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
        r.m[i * 3 + j] = s;
      }
    return r;
  }
  Mat3 transposed() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
};

inline Mat3 rot_x(double a) {
  double c = std::cos(a), s = std::sin(a);
  return {{1, 0, 0, 0, c, -s, 0, s, c}};
}
inline Mat3 rot_y(double a) {
  double c = std::cos(a), s = std::sin(a);
  return {{c, 0, s, 0, 1, 0, -s, 0, c}};
}
inline Mat3 rot_z(double a) {
  double c = std::cos(a), s = std::sin(a);
  return {{c, -s, 0, s, c, 0, 0, 0, 1}};
}

// R_X * R_Y * R_Z composition used for the ego-to-global transform
inline Mat3 rotation(const Pose& p) {
  return rot_x(p.roll) * rot_y(p.pitch) * rot_z(p.yaw);
}

inline Vec3 ego_to_global(const Vec3& v, const Pose& pose) {
  return rotation(pose) * v + Vec3{pose.x, pose.y, pose.z};
}

inline Vec3 global_to_ego(const Vec3& v, const Pose& pose) {
  return rotation(pose).transposed() * (v - Vec3{pose.x, pose.y, pose.z});
}

// yaw-oriented rectangle in the ground plane
struct OrientedRect {
  double cx = 0, cy = 0;
  double half_l = 0, half_w = 0;  // along local x / y
  double yaw = 0;

  bool contains(double px, double py, double margin = 0.0) const {
    double dx = px - cx, dy = py - cy;
    double c = std::cos(yaw), s = std::sin(yaw);
    double lx = c * dx + s * dy;
    double ly = -s * dx + c * dy;
    return std::fabs(lx) <= half_l + margin && std::fabs(ly) <= half_w + margin;
  }

  std::array<std::array<double, 2>, 4> corners() const {
    double c = std::cos(yaw), s = std::sin(yaw);
    std::array<std::array<double, 2>, 4> out;
    const double sx[4] = {1, -1, -1, 1};  // counter-clockwise
    const double sy[4] = {1, 1, -1, -1};
    for (int i = 0; i < 4; ++i) {
      double lx = sx[i] * half_l, ly = sy[i] * half_w;
      out[i] = {cx + c * lx - s * ly, cy + s * lx + c * ly};
    }
    return out;
  }

  double area() const { return 4.0 * half_l * half_w; }
};

// Sutherland-Hodgman clip of a convex polygon against a convex clip polygon
inline double convex_intersection_area(
    const std::array<std::array<double, 2>, 4>& subject,
    const std::array<std::array<double, 2>, 4>& clip) {
  std::vector<std::array<double, 2>> poly(subject.begin(), subject.end());
  for (int e = 0; e < 4; ++e) {
    auto a = clip[e];
    auto b = clip[(e + 1) % 4];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    std::vector<std::array<double, 2>> next;
    next.reserve(poly.size() + 1);
    auto inside = [&](const std::array<double, 2>& p) {
      return ex * (p[1] - a[1]) - ey * (p[0] - a[0]) >= 0.0;
    };
    for (size_t i = 0; i < poly.size(); ++i) {
      auto cur = poly[i];
      auto prev = poly[(i + poly.size() - 1) % poly.size()];
      bool cin = inside(cur), pin = inside(prev);
      if (cin != pin) {
        double dx = cur[0] - prev[0], dy = cur[1] - prev[1];
        double denom = ex * dy - ey * dx;
        double t = denom == 0.0
                       ? 0.0
                       : (ex * (a[1] - prev[1]) - ey * (a[0] - prev[0])) / denom;
        next.push_back({prev[0] + t * dx, prev[1] + t * dy});
      }
      if (cin) next.push_back(cur);
    }
    poly = std::move(next);
    if (poly.empty()) return 0.0;
  }
  double area2 = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    auto& p = poly[i];
    auto& q = poly[(i + 1) % poly.size()];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  return std::fabs(area2) * 0.5;
}

}  // namespace coopsim
