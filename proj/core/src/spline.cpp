#include "mavtrack/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace mav {

HermiteTrajectory::HermiteTrajectory(std::vector<Knot> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2)
    throw std::invalid_argument("spline needs at least two knots");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i].t > knots_[i - 1].t))
      throw std::invalid_argument("spline knot timestamps must be strictly increasing");
}

std::size_t HermiteTrajectory::segment_of(double t) const {
  const auto it = std::upper_bound(
      knots_.begin(), knots_.end(), t,
      [](double x, const Knot& k) { return x < k.t; });
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  return std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
}

Vec3 HermiteTrajectory::eval(double t) const {
  const std::size_t i = segment_of(t);
  const Knot& a = knots_[i];
  const Knot& b = knots_[i + 1];
  const double h = b.t - a.t;
  const double u = (t - a.t) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * a.p + (u3 - 2 * u2 + u) * (h * a.v) +
         (-2 * u3 + 3 * u2) * b.p + (u3 - u2) * (h * b.v);
}

Vec3 HermiteTrajectory::derivative(double t) const {
  const std::size_t i = segment_of(t);
  const Knot& a = knots_[i];
  const Knot& b = knots_[i + 1];
  const double h = b.t - a.t;
  const double u = (t - a.t) / h;
  const double u2 = u * u;
  const Vec3 dp = (6 * u2 - 6 * u) * a.p + (3 * u2 - 4 * u + 1) * (h * a.v) +
                  (-6 * u2 + 6 * u) * b.p + (3 * u2 - 2 * u) * (h * b.v);
  return dp / h;
}

HermiteTrajectory fit_spline(const std::vector<MavState>& history) {
  std::vector<HermiteTrajectory::Knot> knots;
  knots.reserve(history.size());
  for (const MavState& s : history)
    knots.push_back({s.t, s.p, s.v});
  return HermiteTrajectory(std::move(knots));
}

}  // namespace mav
