#pragma once

#include <string>
#include <vector>

#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/scene.hpp"
#include "mavtrack/tracker.hpp"
#include "mavtrack/validator.hpp"

namespace mav {

struct RunMode {
  bool adaptive = true;
  double fixed_f = 0.0;  // Hz, when !adaptive

  std::string label() const;
};

/// Parses "adaptive" or "fixed:<Hz>"; throws ConfigError otherwise.
RunMode parse_mode(const std::string& text);

struct UgvConfig {
  double x = 0.0, y = 0.0, yaw = 0.0;
  double sensor_height = 0.8;
};

struct CalibrationConfig {
  std::vector<double> distances{2, 3, 5, 7, 10, 13, 17, 22, 26, 30};
  std::vector<double> frequencies{5, 10, 20, 50, 100};
  int repetitions = 20;
};

struct ValidationSettings {
  bool enabled = true;
  ValidatorConfig validator;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 10.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode = "adaptive";
  Scene scene;
  ScanPatternConfig pattern;
  TrackerConfig tracker;
  UgvConfig ugv;
  RateSet initial_rates;
  ValidationSettings validation;
  CalibrationConfig calibration;

  void validate() const;  // throws ConfigError (seed is mandatory)
};

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace mav
