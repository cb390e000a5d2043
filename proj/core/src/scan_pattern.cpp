#include "mavtrack/scan_pattern.hpp"

#include <unordered_set>

#include "mavtrack/errors.hpp"

namespace mav {

void ScanPatternConfig::validate() const {
  if (!(fov_h_deg > 0.0 && fov_h_deg < 180.0))
    throw ConfigError("scan_pattern.fov_h must be in (0, 180) degrees");
  if (!(fov_v_deg > 0.0 && fov_v_deg < 180.0))
    throw ConfigError("scan_pattern.fov_v must be in (0, 180) degrees");
  if (!(point_rate > 0.0))
    throw ConfigError("scan_pattern.point_rate must be positive");
  if (!(petal_freq_a > 0.0 && petal_freq_b > 0.0))
    throw ConfigError("scan_pattern.petal_freq must be positive");
}

std::vector<RaySample> sample_directions(const ScanPatternConfig& cfg,
                                         double t0, double dt) {
  cfg.validate();
  if (!(dt > 0.0)) throw ConfigError("sample window dt must be positive");
  std::vector<RaySample> out;
  out.reserve(static_cast<std::size_t>(cfg.point_rate * dt + 1.0));
  for_each_sample(cfg, t0, dt, [&](std::int64_t, double t, double u, double v) {
    out.push_back(RaySample{direction_from_angles(u, v), t});
  });
  return out;
}

double coverage_fraction(const ScanPatternConfig& cfg, double dt,
                         double grid_deg) {
  cfg.validate();
  if (!(dt > 0.0)) throw ConfigError("coverage window dt must be positive");
  if (!(grid_deg > 0.0 && grid_deg < cfg.fov_h_deg && grid_deg < cfg.fov_v_deg))
    throw ConfigError("coverage grid cell must be positive and smaller than both FoV extents");
  const int nu = static_cast<int>(std::ceil(cfg.fov_h_deg / grid_deg));
  const int nv = static_cast<int>(std::ceil(cfg.fov_v_deg / grid_deg));
  std::vector<char> visited(static_cast<std::size_t>(nu) * nv, 0);
  const double g = deg2rad(grid_deg);
  const double u_lo = -0.5 * deg2rad(cfg.fov_h_deg);
  const double v_lo = -0.5 * deg2rad(cfg.fov_v_deg);
  for_each_sample(cfg, 0.0, dt, [&](std::int64_t, double, double u, double v) {
    int iu = static_cast<int>((u - u_lo) / g);
    int iv = static_cast<int>((v - v_lo) / g);
    iu = std::min(std::max(iu, 0), nu - 1);
    iv = std::min(std::max(iv, 0), nv - 1);
    visited[static_cast<std::size_t>(iu) * nv + iv] = 1;
  });
  std::size_t count = 0;
  for (char c : visited) count += c;
  return static_cast<double>(count) / static_cast<double>(visited.size());
}

}  // namespace mav
