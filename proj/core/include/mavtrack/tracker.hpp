#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/sensing_model.hpp"
#include "mavtrack/types.hpp"

namespace mav {

struct TrackerConfig {
  CountThresholds thresholds;
  double ground_margin = 0.3;        // m
  double search_radius_base = 0.5;   // m
  double search_radius_speed_gain = 1.0;  // s (radius grows by gain*|v|*I)
  double beta = 0.6;                 // velocity smoothing factor (new-sample weight)
  double velocity_baseline = 0.5;    // s, finite-difference span
  double lost_timeout = 1.0;         // s without any accepted extraction
  double fov_margin_deg = 5.0;
  double v_max = 10.0;               // m/s
  double c_blur = 1.0;               // per-frame displacement cap, MAV diameters
  double mav_diameter = 0.26;        // m, bounding-box diagonal
  double extent_margin = 0.3;        // m, accepted cluster spread beyond smear
  double k_yaw = 2.0;                // 1/s
  double yaw_rate_max = 1.0;         // rad/s
  double k_forward = 2.0;            // m/s per rad of elevation overflow
  double forward_max = 1.0;          // m/s
  double ground_z = 0.0;

  void validate() const;
};

/// Pure per-operation pieces (tested independently of the stateful tracker).
Frame ground_removal(const Frame& frame, double ground_z, double ground_margin,
                     double last_mav_altitude);
Vec3 predict(const Vec3& p_prev, const Vec3& v_prev, double f);
Vec3 centroid(const std::vector<Vec3>& points);
MavState fuse(const std::optional<MavState>& est_MF,
              const std::optional<MavState>& est_HF);
RateSet adjust_rates(const MavState& state, const SensorPose& sensor,
                     const DensityModel& model, const CountThresholds& thr,
                     const TrackerConfig& cfg);
UgvCommand ugv_control(const MavState& state, const UgvState& ugv,
                       const ScanPatternConfig& fov, double fov_margin_deg,
                       const TrackerConfig& cfg, double sensor_height);

struct FrameDiagnostics {
  double t_end = 0.0;
  Modality modality = Modality::MF;
  double radius = 0.0;
  double expected_mu = 0.0;
  int n_points = 0;
  bool accepted = false;
  double extent = 0.0;
};

struct TrackRecord {
  std::vector<MavState> fused;
  std::vector<MavState> raw;  // accepted per-modality estimates
  std::vector<FrameDiagnostics> diagnostics;
  bool lost = false;
  double lost_t = 0.0;
};

/// Stateful per-frame tracking loop: ground removal, spatial index, predicted
/// radius search, centroid, fusion, rate adaptation, FoV-keeping command.
class Tracker {
 public:
  Tracker(TrackerConfig cfg, const DensityModel* model,
          const ScanPatternConfig& fov, double sensor_height,
          bool adaptive, RateSet initial_rates);

  /// Seeds the last-known state (the target's initial position is assumed
  /// known after take-off).
  void init(const MavState& s0);

  /// Consumes one frame (any modality); points in the sensor frame, the
  /// frame's mid-window pose supplies the world transform.
  void process_frame(const Frame& frame, const UgvState& ugv);

  bool lost() const { return record_.lost; }
  const RateSet& rates() const { return rates_; }
  UgvCommand command() const { return command_; }
  const TrackRecord& record() const { return record_; }
  const MavState& last_state() const { return last_; }

 private:
  std::optional<MavState> extract_estimate(const Frame& frame,
                                           const UgvState& ugv);
  void update_fused(const MavState& fused_candidate);
  Vec3 smoothed_velocity(const Vec3& p, double t);

  TrackerConfig cfg_;
  const DensityModel* model_;
  ScanPatternConfig fov_;
  double sensor_height_;
  bool adaptive_;
  RateSet rates_;
  UgvCommand command_;
  TrackRecord record_;
  MavState last_;                 // last fused state
  Vec3 v_smoothed_ = Vec3::Zero();
  bool have_state_ = false;
  double last_accept_t_ = 0.0;
  std::optional<MavState> latest_MF_;
  std::optional<MavState> latest_HF_;
  std::deque<std::pair<double, Vec3>> pos_history_;
};

}  // namespace mav
