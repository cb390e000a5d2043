#pragma once

#include <vector>

#include "mavtrack/types.hpp"

namespace mav {

/// Piecewise cubic interpolant constrained by knot positions and first
/// derivatives; second-derivative continuity is intentionally not imposed.
class HermiteTrajectory {
 public:
  struct Knot {
    double t;
    Vec3 p;
    Vec3 v;
  };

  HermiteTrajectory() = default;
  explicit HermiteTrajectory(std::vector<Knot> knots);

  Vec3 eval(double t) const;
  Vec3 derivative(double t) const;

  double t_min() const { return knots_.front().t; }
  double t_max() const { return knots_.back().t; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::size_t segment_of(double t) const;
  std::vector<Knot> knots_;
};

/// Builds the interpolant from a window of fused track states.
HermiteTrajectory fit_spline(const std::vector<MavState>& history);

}  // namespace mav
