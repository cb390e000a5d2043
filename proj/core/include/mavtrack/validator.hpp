#pragma once

#include <vector>

#include "mavtrack/sensing_model.hpp"
#include "mavtrack/spline.hpp"
#include "mavtrack/types.hpp"
#include "mavtrack/voxel.hpp"

namespace mav {

struct ValidatorConfig {
  double voxel_size = 0.1;       // m
  double threshold = 0.5;        // IoU acceptance
  double sweep_step = 0.005;     // s
  double corridor_radius = 0.5;  // m, target attribution around the spline
};

struct ValidationReport {
  double t0 = 0.0, t1 = 0.0;
  double iou = 0.0;
  double threshold = 0.5;
  bool accepted = false;
  std::size_t n_expected_voxels = 0;
  std::size_t n_observed_voxels = 0;
  std::size_t n_corridor_points = 0;
};

/// Sweeps the target bounding box along the interpolated trajectory over
/// [t0, t1], marking voxels wherever the density model expects at least one
/// return at that distance from the sensor.
VoxelCloud expected_cloud(
    const HermiteTrajectory& traj, const DensityModel& model, double f_query,
    const std::vector<std::pair<double, SensorPose>>& poses,
    const Vec3& mav_half_extents, double voxel_size, double t0, double t1,
    double sweep_step = 0.005);

/// One low-frequency window: fits the interpolant to the history, attributes
/// window points to the target by spline corridor, and accepts the trajectory
/// iff the voxel IoU of observed vs. expected clears the threshold.
/// `lf_points` carry world-frame positions with their capture times.
ValidationReport validate(
    const std::vector<LidarPoint>& lf_points, double t0, double t1,
    const std::vector<MavState>& history, const DensityModel& model,
    const std::vector<std::pair<double, SensorPose>>& poses,
    const Vec3& mav_half_extents, double f_query, const ValidatorConfig& cfg);

}  // namespace mav
