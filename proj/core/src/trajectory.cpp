#include "mavtrack/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

#include "mavtrack/errors.hpp"

namespace mav {
namespace {

// Integrated tangential arc length of the ramped speed profile at time t.
double ramp_arc_length(double v0, double v1, double ramp, double t) {
  if (ramp <= 0.0) return v1 * t;
  if (t <= ramp) {
    const double a = (v1 - v0) / ramp;
    return v0 * t + 0.5 * a * t * t;
  }
  return 0.5 * (v0 + v1) * ramp + v1 * (t - ramp);
}

double ramp_speed(double v0, double v1, double ramp, double t) {
  if (ramp <= 0.0) return v1;
  return t <= ramp ? v0 + (v1 - v0) * t / ramp : v1;
}

}  // namespace

void TrajectoryScript::validate() const {
  if (!(duration > 0.0)) throw ConfigError("trajectory.duration must be positive");
  switch (kind) {
    case Kind::Line:
      if (!(speed > 0.0)) throw ConfigError("trajectory.speed must be positive");
      if ((end - start).norm() <= 0.0)
        throw ConfigError("trajectory line start and end coincide");
      break;
    case Kind::Circle:
      if (!(radius > 0.0)) throw ConfigError("trajectory.radius must be positive");
      if (!(speed_start > 0.0 && speed_end > 0.0))
        throw ConfigError("trajectory circle speeds must be positive");
      break;
    case Kind::Waypoint:
      if (knots.size() < 2) throw ConfigError("trajectory.knots needs >= 2 entries");
      for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i].t > knots[i - 1].t))
          throw ConfigError("trajectory.knots timestamps must be strictly increasing");
      break;
  }
}

KinematicSample eval_trajectory(const TrajectoryScript& s, double t) {
  if (t < -1e-12 || t > s.duration + 1e-12)
    throw std::out_of_range("trajectory evaluated outside scenario duration");
  t = std::clamp(t, 0.0, s.duration);

  switch (s.kind) {
    case TrajectoryScript::Kind::Line: {
      const Vec3 dirv = (s.end - s.start).normalized();
      const double len = (s.end - s.start).norm();
      const double d = std::min(s.speed * t, len);
      const Vec3 v = d < len ? Vec3(s.speed * dirv) : Vec3(Vec3::Zero());
      return {s.start + d * dirv, v};
    }
    case TrajectoryScript::Kind::Circle: {
      const double arc =
          ramp_arc_length(s.speed_start, s.speed_end, s.ramp_duration, t);
      const double speedv = ramp_speed(s.speed_start, s.speed_end, s.ramp_duration, t);
      const double theta = s.start_angle + arc / s.radius;
      const double c = std::cos(theta), sn = std::sin(theta);
      const Vec3 p = s.center + Vec3(s.radius * c, s.radius * sn, 0.0);
      const Vec3 v(-speedv * sn, speedv * c, 0.0);
      return {p, v};
    }
    case TrajectoryScript::Kind::Waypoint: {
      const auto& k = s.knots;
      const double tt = std::clamp(t, k.front().t, k.back().t);
      std::size_t i = 0;
      while (i + 2 < k.size() && tt >= k[i + 1].t) ++i;
      const double h = k[i + 1].t - k[i].t;
      const double u = (tt - k[i].t) / h;
      // Catmull-Rom tangents from neighboring knots (one-sided at the ends).
      auto tangent = [&](std::size_t j) -> Vec3 {
        const std::size_t lo = j == 0 ? 0 : j - 1;
        const std::size_t hi = j + 1 < k.size() ? j + 1 : j;
        return (k[hi].p - k[lo].p) / (k[hi].t - k[lo].t);
      };
      const Vec3 p0 = k[i].p, p1 = k[i + 1].p;
      const Vec3 m0 = tangent(i) * h, m1 = tangent(i + 1) * h;
      const double u2 = u * u, u3 = u2 * u;
      const Vec3 p = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 +
                     (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
      const Vec3 dp = (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 +
                      (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1;
      return {p, dp / h};
    }
  }
  throw std::logic_error("unreachable trajectory kind");
}

double circle_revolutions(const TrajectoryScript& s, double t) {
  if (s.kind != TrajectoryScript::Kind::Circle) return 0.0;
  const double arc = ramp_arc_length(s.speed_start, s.speed_end, s.ramp_duration,
                                     std::clamp(t, 0.0, s.duration));
  return arc / (2.0 * kPi * s.radius);
}

}  // namespace mav
