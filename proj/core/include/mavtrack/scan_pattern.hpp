#pragma once

#include <vector>

#include "mavtrack/geometry.hpp"

namespace mav {

/// Two incommensurate sinusoids sweep azimuth/elevation; the frequency ratio
/// is the golden ratio so the pattern never retraces and longer integration
/// windows cover more of the FoV.
struct ScanPatternConfig {
  double fov_h_deg = 81.7;
  double fov_v_deg = 25.1;
  double point_rate = 7.2e6;  // samples per second
  // Petal rates sit well above the fastest frame rate so that even a 10 ms
  // window sweeps the full FoV several times; the golden-ratio second axis
  // keeps the pattern non-repeating.
  double petal_freq_a = 450.0;
  double petal_freq_b = 450.0 * kGoldenRatio;
  double phase = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct RaySample {
  Vec3 direction;  // unit, sensor frame
  double t = 0.0;
};

/// Unit direction with azimuth u, elevation v (radians).
inline Vec3 direction_from_angles(double u, double v) {
  const double cv = std::cos(v);
  return Vec3(cv * std::cos(u), cv * std::sin(u), std::sin(v));
}

/// Scan angles at absolute time t.
inline void scan_angles(const ScanPatternConfig& cfg, double t, double& u,
                        double& v) {
  u = 0.5 * deg2rad(cfg.fov_h_deg) * std::sin(2.0 * kPi * cfg.petal_freq_a * t);
  v = 0.5 * deg2rad(cfg.fov_v_deg) *
      std::sin(2.0 * kPi * cfg.petal_freq_b * t + cfg.phase);
}

/// Calls fn(sample_index, t, u, v) for every sample on the global grid
/// t_i = i / point_rate with t_i in [t0, t0 + dt); emits exactly
/// floor(point_rate * dt) samples. Uses the sin/cos angle-sum recurrence
/// within the window (seeded exactly at the first sample) so long streams
/// cost two rotations per sample instead of two sin() calls.
template <class Fn>
void for_each_sample(const ScanPatternConfig& cfg, double t0, double dt,
                     Fn&& fn) {
  const double rate = cfg.point_rate;
  const std::int64_t n = static_cast<std::int64_t>(rate * dt + 1e-9);
  const std::int64_t i0 = static_cast<std::int64_t>(std::ceil(t0 * rate - 1e-9));
  const double wa = 2.0 * kPi * cfg.petal_freq_a / rate;
  const double wb = 2.0 * kPi * cfg.petal_freq_b / rate;
  const double ca = std::cos(wa), sa_step = std::sin(wa);
  const double cb = std::cos(wb), sb_step = std::sin(wb);
  const double au = 0.5 * deg2rad(cfg.fov_h_deg);
  const double av = 0.5 * deg2rad(cfg.fov_v_deg);
  const double ta0 = wa * static_cast<double>(i0);
  const double tb0 = wb * static_cast<double>(i0) + cfg.phase;
  double sinA = std::sin(ta0), cosA = std::cos(ta0);
  double sinB = std::sin(tb0), cosB = std::cos(tb0);
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t i = i0 + k;
    fn(i, static_cast<double>(i) / rate, au * sinA, av * sinB);
    const double sA = sinA * ca + cosA * sa_step;
    cosA = cosA * ca - sinA * sa_step;
    sinA = sA;
    const double sB = sinB * cb + cosB * sb_step;
    cosB = cosB * cb - sinB * sb_step;
    sinB = sB;
  }
}

/// Materialized sample window (testing / small windows).
std::vector<RaySample> sample_directions(const ScanPatternConfig& cfg,
                                         double t0, double dt);

/// Fraction of angular grid cells (grid_deg-sized) of the FoV rectangle
/// visited by at least one sample in a window [0, dt).
double coverage_fraction(const ScanPatternConfig& cfg, double dt,
                         double grid_deg);

}  // namespace mav
