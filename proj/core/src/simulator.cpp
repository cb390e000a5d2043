#include "mavtrack/simulator.hpp"

#include <algorithm>

#include "mavtrack/errors.hpp"
#include "mavtrack/rng.hpp"

namespace mav {
namespace {

constexpr std::uint64_t kRayStream = 1;
constexpr std::uint64_t kClutterStream = 2;

struct Hit {
  double range;
  double reflectivity;
};

// Nearest intersection among ground plane, obstacles, and the MAV box.
// origin/dir in world frame; dir unit.
inline bool trace(const Scene& scene, const Vec3& origin, const Vec3& dir,
                  const Vec3& mav_pos, Hit& hit) {
  double best = std::numeric_limits<double>::infinity();
  double refl = 0.0;
  if (scene.has_ground && dir.z() != 0.0) {
    const double tg = (scene.ground_z - origin.z()) / dir.z();
    if (tg > 1e-9 && tg < best) {
      best = tg;
      refl = scene.ground_reflectivity;
    }
  }
  const Vec3 inv(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
  auto box_entry = [&](const Vec3& lo, const Vec3& hi) -> double {
    double tmin = 0.0, tmax = best;
    for (int i = 0; i < 3; ++i) {
      double t0 = (lo[i] - origin[i]) * inv[i];
      double t1 = (hi[i] - origin[i]) * inv[i];
      if (inv[i] < 0.0) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
      if (tmax < tmin) return -1.0;
    }
    return tmin;
  };
  for (const Obstacle& ob : scene.obstacles) {
    const double t = box_entry(ob.box.min(), ob.box.max());
    if (t > 1e-9 && t < best) {
      best = t;
      refl = ob.reflectivity;
    }
  }
  const double tm = box_entry(mav_pos - scene.mav.half_extents,
                              mav_pos + scene.mav.half_extents);
  if (tm > 1e-9 && tm < best) {
    best = tm;
    refl = scene.mav.reflectivity;
  }
  if (!std::isfinite(best)) return false;
  hit = {best, refl};
  return true;
}

// Applies dropout and range noise; returns the surviving sensor-frame point.
inline bool apply_noise(const Scene& scene, const Vec3& dir_sensor, double t,
                        const Hit& hit, std::int64_t ray_index,
                        LidarPoint& out) {
  SplitMix64 rng = substream(scene.noise.seed, kRayStream,
                             static_cast<std::uint64_t>(ray_index));
  if (scene.noise.dropout_enabled) {
    const double p =
        std::clamp(scene.noise.dropout_alpha * hit.range /
                       (hit.reflectivity * scene.noise.dropout_r_max),
                   0.0, scene.noise.dropout_p_max);
    if (rng.uniform() < p) return false;
  }
  double range = hit.range;
  if (scene.noise.range_sigma > 0.0)
    range += scene.noise.range_sigma * rng.normal();
  out.position = dir_sensor * range;
  out.t = t;
  return true;
}

}  // namespace

void Scene::validate() const {
  for (const Obstacle& ob : obstacles)
    if (!(ob.box.half.minCoeff() > 0.0))
      throw ConfigError("scene obstacle half-extents must be positive");
  for (const Obstacle& ob : obstacles)
    if (ob.reflectivity < 0.0 || ob.reflectivity > 1.0)
      throw ConfigError("scene reflectivity must be in [0, 1]");
  if (mav.reflectivity < 0.0 || mav.reflectivity > 1.0)
    throw ConfigError("scene.mav.reflectivity must be in [0, 1]");
  const double vol_cm3 = 8.0 * mav.half_extents.prod() * 1e6;
  if (vol_cm3 < 100.0 || vol_cm3 > 2000.0)
    throw ConfigError("scene.mav.half_extents give a volume outside [100, 2000] cm^3");
  if (noise.range_sigma < 0.0)
    throw ConfigError("scene.noise.range_sigma must be nonnegative");
  if (noise.dropout_p_max < 0.0 || noise.dropout_p_max > 1.0)
    throw ConfigError("scene.noise.dropout_p_max must be in [0, 1]");
  mav.trajectory.validate();
}

std::optional<LidarPoint> cast_ray(const Scene& scene, const SensorPose& pose,
                                   const RaySample& sample, const Vec3& mav_pos,
                                   std::int64_t ray_index) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  const Vec3& d = sample.direction;
  const Vec3 dir_world(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z());
  Hit hit;
  if (!trace(scene, pose.origin, dir_world, mav_pos, hit)) return std::nullopt;
  LidarPoint pt;
  if (!apply_noise(scene, d, sample.t, hit, ray_index, pt)) return std::nullopt;
  return pt;
}

Simulator::Simulator(Scene scene, ScanPatternConfig pattern)
    : scene_(std::move(scene)), pattern_(pattern) {
  scene_.validate();
  pattern_.validate();
}

void Simulator::generate_chunk(double t0, double t1, const SensorPose& pose,
                               std::vector<LidarPoint>& out) const {
  if (!(t1 > t0)) throw ConfigError("simulator chunk must have positive length");
  const double dt = t1 - t0;
  const Vec3 mav_p0 = eval_trajectory(scene_.mav.trajectory, t0).p;
  const Vec3 mav_p1 = eval_trajectory(scene_.mav.trajectory, std::min(
                          t1, scene_.mav.trajectory.duration)).p;

  // Near-surface clutter for this chunk, pre-generated time-sorted so it can
  // be merged into the ray stream on the fly.
  std::vector<LidarPoint> clutter;
  if (scene_.noise.near_surface_clutter_rate > 0.0 && !scene_.obstacles.empty()) {
    const Vec3 mav_mid = 0.5 * (mav_p0 + mav_p1);
    const Aabb mav_box{mav_mid, scene_.mav.half_extents};
    double best_gap = std::numeric_limits<double>::infinity();
    Vec3 wall_pt = Vec3::Zero();
    for (const Obstacle& ob : scene_.obstacles) {
      const Vec3 q = ob.box.closest_point(mav_mid);
      const double gap = mav_box.distance(q);
      if (gap < best_gap) {
        best_gap = gap;
        wall_pt = q;
      }
    }
    if (best_gap <= scene_.noise.clutter_trigger_distance) {
      const std::uint64_t chunk_key = static_cast<std::uint64_t>(
          std::llround(std::ceil(t0 * pattern_.point_rate - 1e-9)));
      SplitMix64 rng = substream(scene_.noise.seed, kClutterStream, chunk_key);
      const int n = rng.poisson(scene_.noise.near_surface_clutter_rate * dt);
      const Vec3 seg_start = mav_box.closest_point(wall_pt);
      clutter.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double s = rng.uniform();
        const Vec3 pw = seg_start + s * (wall_pt - seg_start);
        clutter.push_back(LidarPoint{pose.to_sensor(pw), t0 + rng.uniform() * dt});
      }
      std::sort(clutter.begin(), clutter.end(),
                [](const LidarPoint& a, const LidarPoint& b) { return a.t < b.t; });
    }
  }
  std::size_t ci = 0;

  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  const double inv_dt = 1.0 / dt;
  for_each_sample(pattern_, t0, dt,
                  [&](std::int64_t index, double t, double u, double v) {
    while (ci < clutter.size() && clutter[ci].t <= t) out.push_back(clutter[ci++]);
    const Vec3 d = direction_from_angles(u, v);
    const Vec3 dir_world(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z());
    const double a = (t - t0) * inv_dt;
    const Vec3 mav_pos = mav_p0 + a * (mav_p1 - mav_p0);
    Hit hit;
    if (!trace(scene_, pose.origin, dir_world, mav_pos, hit)) return;
    LidarPoint pt;
    if (apply_noise(scene_, d, t, hit, index, pt)) out.push_back(pt);
  });
  while (ci < clutter.size()) out.push_back(clutter[ci++]);
}

std::vector<LidarPoint> simulate_stream(const Scene& scene,
                                        const ScanPatternConfig& pattern,
                                        const SensorPose& pose,
                                        double duration) {
  if (!(duration > 0.0)) throw ConfigError("stream duration must be positive");
  Simulator sim(scene, pattern);
  std::vector<LidarPoint> out;
  const double chunk = 0.005;
  for (double t = 0.0; t < duration - 1e-12; t += chunk)
    sim.generate_chunk(t, std::min(t + chunk, duration), pose, out);
  return out;
}

}  // namespace mav
