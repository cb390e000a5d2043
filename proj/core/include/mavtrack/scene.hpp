#pragma once

#include <cstdint>
#include <vector>

#include "mavtrack/geometry.hpp"
#include "mavtrack/trajectory.hpp"

namespace mav {

struct Obstacle {
  Aabb box;
  double reflectivity = 0.8;
};

struct MavBody {
  Vec3 half_extents{0.09, 0.09, 0.025};
  double reflectivity = 0.3;
  TrajectoryScript trajectory;
};

struct NoiseConfig {
  double range_sigma = 0.02;
  // dropout probability = clamp(alpha * distance / (reflectivity * r_max),
  //                             0, p_max)
  double dropout_alpha = 0.5;
  double dropout_r_max = 90.0;
  double dropout_p_max = 0.95;
  bool dropout_enabled = true;
  // spurious returns on the MAV-to-wall segment while the MAV is close to a
  // surface
  double near_surface_clutter_rate = 0.0;  // points per second
  double clutter_trigger_distance = 0.3;   // meters, MAV surface to obstacle
  std::uint64_t seed = 0;
};

struct Scene {
  bool has_ground = true;
  double ground_z = 0.0;
  double ground_reflectivity = 0.8;
  std::vector<Obstacle> obstacles;
  MavBody mav;
  NoiseConfig noise;

  void validate() const;  // throws ConfigError
};

}  // namespace mav
