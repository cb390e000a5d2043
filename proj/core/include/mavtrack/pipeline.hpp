#pragma once

#include <string>
#include <vector>

#include "mavtrack/config.hpp"
#include "mavtrack/sensing_model.hpp"
#include "mavtrack/tracker.hpp"
#include "mavtrack/validator.hpp"

namespace mav {

struct GroundTruthRow {
  double t;
  Vec3 p, v;     // MAV
  double qx, qy, qyaw;  // UGV
};

struct FrameStat {
  Modality modality;
  double t_start;
  double integration_time;
  int n_points;
};

struct RunMetrics {
  bool lost = false;
  double lost_t = 0.0;
  double track_duration = 0.0;       // last accepted fused estimate time
  double mean_position_error = 0.0;  // fused vs. ground truth
  double rmse_fused = 0.0;
  double rmse_HF = 0.0;
  double rmse_MF = 0.0;
  double miss_rate = 0.0;            // rejected fraction of processed frames
  double revolutions = 0.0;          // circle scripts only, at loss/end time
  int n_validations = 0;
  int n_validations_accepted = 0;
};

struct TrackRow {
  double t;
  std::string modality;  // HF, MF, fused
  Vec3 p, v;
  int n_points;
  double f_HF, f_MF;
  int lost;
};

struct RunResult {
  std::string mode;
  TrackRecord record;
  std::vector<TrackRow> track_rows;
  std::vector<GroundTruthRow> ground_truth;
  std::vector<FrameStat> frame_stats;
  std::vector<ValidationReport> validations;
  std::vector<std::string> warnings;
  RunMetrics metrics;
};

/// Closed-loop scenario run: simulator -> taps -> tracker -> rate/UGV
/// feedback, with low-frequency trajectory validation on the side.
RunResult run_tracking(const ScenarioConfig& cfg, const DensityModel& model,
                       const RunMode& mode);

/// Density calibration driven by the scenario's calibration section.
DensityModel run_calibration(const ScenarioConfig& cfg);

/// Writes track.csv, ground_truth.csv, frames.csv, spacing.csv and
/// diagnostics.json into out_dir (created if missing).
void write_outputs(const RunResult& result, const std::string& out_dir);

/// CSV of the calibration table (one row per grid cell).
void write_model_csv(const DensityModel& model, const std::string& path);

}  // namespace mav
