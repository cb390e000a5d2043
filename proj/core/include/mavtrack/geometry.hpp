#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <optional>

namespace mav {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGoldenRatio = 1.61803398874989484820;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// Pose of the lidar in the world frame: planar position + mount height,
/// yaw about +z. The world frame is the UGV start pose.
struct SensorPose {
  Vec3 origin{0.0, 0.0, 0.0};
  double yaw = 0.0;

  Vec3 to_world(const Vec3& p_sensor) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return Vec3(c * p_sensor.x() - s * p_sensor.y() + origin.x(),
                s * p_sensor.x() + c * p_sensor.y() + origin.y(),
                p_sensor.z() + origin.z());
  }

  Vec3 to_sensor(const Vec3& p_world) const {
    const Vec3 d = p_world - origin;
    const double c = std::cos(yaw), s = std::sin(yaw);
    return Vec3(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
  }
};

/// Azimuth of a point in the sensor frame, radians, +left.
inline double azimuth_of(const Vec3& p_sensor) {
  return std::atan2(p_sensor.y(), p_sensor.x());
}

/// Elevation of a point in the sensor frame, radians, +up.
inline double elevation_of(const Vec3& p_sensor) {
  return std::atan2(p_sensor.z(), std::hypot(p_sensor.x(), p_sensor.y()));
}

/// Axis-aligned box.
struct Aabb {
  Vec3 center{0, 0, 0};
  Vec3 half{1, 1, 1};

  Vec3 min() const { return center - half; }
  Vec3 max() const { return center + half; }

  bool contains(const Vec3& p) const {
    const Vec3 d = (p - center).cwiseAbs();
    return d.x() <= half.x() && d.y() <= half.y() && d.z() <= half.z();
  }

  /// Distance from a point to the box surface (0 inside).
  double distance(const Vec3& p) const {
    const Vec3 d = ((p - center).cwiseAbs() - half).cwiseMax(0.0);
    return d.norm();
  }

  /// Closest point on (or in) the box to p.
  Vec3 closest_point(const Vec3& p) const {
    return p.cwiseMax(min()).cwiseMin(max());
  }

  /// Slab test. Returns the entry distance of the ray into the box, or
  /// nothing if the ray misses. Rays starting inside report distance 0.
  std::optional<double> ray_hit(const Vec3& origin, const Vec3& dir) const {
    double tmin = 0.0;
    double tmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const double inv = 1.0 / dir[i];
      double t0 = (min()[i] - origin[i]) * inv;
      double t1 = (max()[i] - origin[i]) * inv;
      if (inv < 0.0) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
      if (tmax < tmin) return std::nullopt;
    }
    return tmin;
  }
};

}  // namespace mav
