#pragma once

#include <cstdint>
#include <vector>

#include "mavtrack/geometry.hpp"

namespace mav {

struct LidarPoint {
  Vec3 position;  // sensor frame at capture time
  double t = 0.0;
};

enum class Modality { HF, MF, LF };

inline const char* modality_name(Modality m) {
  switch (m) {
    case Modality::HF: return "HF";
    case Modality::MF: return "MF";
    default: return "LF";
  }
}

/// One integration window of the point stream. Points are kept in the sensor
/// frame; `pose` is the carrier pose at t_start and `mid_pose` the pose at the
/// window midpoint. World-frame consumers use mid_pose so that the smear from
/// carrier motion within the window stays centered instead of biased to one
/// side; the smear itself is deliberately kept.
struct Frame {
  std::vector<LidarPoint> points;
  double t_start = 0.0;
  double integration_time = 0.0;
  Modality modality = Modality::MF;
  SensorPose pose;
  SensorPose mid_pose;

  double t_end() const { return t_start + integration_time; }
};

struct RateSet {
  double f_HF = 100.0;  // [20, 100] Hz
  double f_MF = 10.0;   // [5, 20] Hz
  double f_LF = 0.5;    // (0, 1] Hz
  bool density_flag_HF = false;  // requested count infeasible at any HF rate
  bool density_flag_MF = false;
};

enum class EstimateSource { HF, MF, Fused };

struct MavState {
  Vec3 p = Vec3::Zero();  // world frame
  Vec3 v = Vec3::Zero();
  double t = 0.0;
  int n_points = 0;
  EstimateSource source = EstimateSource::Fused;
};

struct UgvState {
  double x = 0.0, y = 0.0, yaw = 0.0;
  double vx = 0.0, vy = 0.0, yaw_rate = 0.0;

  SensorPose sensor_pose(double sensor_height) const {
    return SensorPose{Vec3(x, y, sensor_height), yaw};
  }
};

struct UgvCommand {
  double forward = 0.0;   // m/s along heading
  double yaw_rate = 0.0;  // rad/s
};

}  // namespace mav
