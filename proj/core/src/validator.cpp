#include "mavtrack/validator.hpp"

#include <algorithm>
#include <stdexcept>

namespace mav {
namespace {

SensorPose pose_at(const std::vector<std::pair<double, SensorPose>>& poses,
                   double t) {
  if (poses.empty()) throw std::invalid_argument("validator needs sensor poses");
  SensorPose out = poses.front().second;
  for (const auto& [pt, pose] : poses) {
    if (pt > t) break;
    out = pose;
  }
  return out;
}

}  // namespace

VoxelCloud expected_cloud(
    const HermiteTrajectory& traj, const DensityModel& model, double f_query,
    const std::vector<std::pair<double, SensorPose>>& poses,
    const Vec3& mav_half_extents, double voxel_size, double t0, double t1,
    double sweep_step) {
  if (!(t1 > t0)) throw std::invalid_argument("expected_cloud window is empty");
  if (t0 < traj.t_min() - 1e-9 || t1 > traj.t_max() + 1e-9)
    throw std::invalid_argument("trajectory does not cover the validation window");
  VoxelCloud cloud(voxel_size);
  for (double t = t0; t <= t1 + 1e-12; t += sweep_step) {
    const Vec3 p = traj.eval(std::clamp(t, traj.t_min(), traj.t_max()));
    const double d = (p - pose_at(poses, t).origin).norm();
    if (model.expected_count(d, f_query).mu < 1.0) continue;
    cloud.insert_box(Aabb{p, mav_half_extents});
  }
  return cloud;
}

ValidationReport validate(
    const std::vector<LidarPoint>& lf_points, double t0, double t1,
    const std::vector<MavState>& history, const DensityModel& model,
    const std::vector<std::pair<double, SensorPose>>& poses,
    const Vec3& mav_half_extents, double f_query, const ValidatorConfig& cfg) {
  std::vector<MavState> window;
  for (const MavState& s : history)
    if (s.t >= t0 - 1e-9 && s.t <= t1 + 1e-9) window.push_back(s);
  if (window.size() < 2)
    throw std::invalid_argument("track history does not span the validation window");

  const HermiteTrajectory traj = fit_spline(window);
  ValidationReport report;
  report.t0 = t0;
  report.t1 = t1;
  report.threshold = cfg.threshold;

  const VoxelCloud expected =
      expected_cloud(traj, model, f_query, poses, mav_half_extents,
                     cfg.voxel_size, traj.t_min(), traj.t_max(), cfg.sweep_step);

  VoxelCloud observed(cfg.voxel_size);
  for (const LidarPoint& p : lf_points) {
    const double tc = std::clamp(p.t, traj.t_min(), traj.t_max());
    if ((p.position - traj.eval(tc)).norm() > cfg.corridor_radius) continue;
    observed.insert(p.position);
    ++report.n_corridor_points;
  }

  report.n_expected_voxels = expected.size();
  report.n_observed_voxels = observed.size();
  report.iou = iou(observed, expected);
  report.accepted = report.iou > cfg.threshold;
  return report;
}

}  // namespace mav
