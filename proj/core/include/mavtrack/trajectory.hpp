#pragma once

#include <vector>

#include "mavtrack/geometry.hpp"

namespace mav {

/// Scripted MAV motion. Three kinds:
///  - line: start -> end at constant speed;
///  - circle: horizontal circle with tangential speed ramping linearly from
///    speed_start to speed_end over ramp_duration, constant afterwards;
///  - waypoint: Catmull-Rom interpolation through timed knots (C1).
struct TrajectoryScript {
  enum class Kind { Line, Circle, Waypoint } kind = Kind::Line;

  // line
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  double speed = 1.0;

  // circle
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double speed_start = 1.0;
  double speed_end = 1.0;
  double ramp_duration = 0.0;
  double start_angle = 0.0;  // radians, angle of first position on the circle

  // waypoint
  struct Knot {
    double t;
    Vec3 p;
  };
  std::vector<Knot> knots;

  double duration = 10.0;

  void validate() const;  // throws ConfigError
};

struct KinematicSample {
  Vec3 p;
  Vec3 v;
};

/// Analytic position/velocity at t; throws std::out_of_range outside
/// [0, duration].
KinematicSample eval_trajectory(const TrajectoryScript& script, double t);

/// Arc length swept by a circle script up to t, in revolutions.
double circle_revolutions(const TrajectoryScript& script, double t);

}  // namespace mav
