#pragma once

#include <string>
#include <vector>

#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/scene.hpp"

namespace mav {

struct CountThresholds {
  int n_min_HF = 4;
  int n_min_MF = 20;
};

struct CountEstimate {
  double mu = 0.0;
  double sigma = 0.0;
  bool clamped = false;  // query fell outside the calibrated hull
};

struct FrequencyChoice {
  double f = 0.0;
  bool feasible = false;  // false: no frequency in the band reaches the count
};

/// Empirical (distance, frequency) -> on-target point count table with
/// bilinear interpolation in (distance, 1/frequency). Immutable once
/// calibrated or loaded.
class DensityModel {
 public:
  DensityModel() = default;
  DensityModel(std::vector<double> distances, std::vector<double> frequencies,
               std::vector<std::vector<double>> mu,
               std::vector<std::vector<double>> sigma);

  bool calibrated() const { return !distances_.empty(); }

  /// Bilinear interpolation; queries outside the grid hull are clamped to the
  /// hull and flagged.
  CountEstimate expected_count(double d, double f) const;

  /// Largest f in [band_lo, band_hi] with mu(d, f) >= n; band_lo with
  /// feasible=false when none exists.
  FrequencyChoice min_frequency_for_count(double d, double n, double band_lo,
                                          double band_hi) const;

  const std::vector<double>& distances() const { return distances_; }
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<std::vector<double>>& mu() const { return mu_; }
  const std::vector<std::vector<double>>& sigma() const { return sigma_; }

  /// True when mu is nonincreasing in distance at fixed frequency and
  /// nondecreasing in integration time at fixed distance.
  bool monotone() const;

  std::string to_json() const;
  static DensityModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static DensityModel load(const std::string& path);

 private:
  std::vector<double> distances_;    // ascending
  std::vector<double> frequencies_;  // ascending
  std::vector<std::vector<double>> mu_;     // [distance][frequency]
  std::vector<std::vector<double>> sigma_;  // [distance][frequency]
};

/// Pool-adjacent-violators pass enforcing the monotone trend on both table
/// axes (nonincreasing in d, nonincreasing in f).
void isotonic_smooth(std::vector<std::vector<double>>& table);

/// Hovers the MAV of `scene_template` (clutter disabled) at each ladder
/// distance straight ahead of the sensor and measures per-frame on-target
/// counts over `repetitions` frames per (d, f) cell.
DensityModel calibrate(const Scene& scene_template,
                       const ScanPatternConfig& pattern,
                       const std::vector<double>& distances,
                       const std::vector<double>& frequencies, int repetitions,
                       std::uint64_t seed, double sensor_height = 0.8);

/// Nominal distance between consecutive detections of a target moving at
/// `speed` observed at frame rate `f`.
double expected_spacing(double speed, double f);

}  // namespace mav
