#pragma once

#include <stdexcept>
#include <string>

namespace mav {

/// Bad or missing configuration (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Calibration could not produce a usable model (maps to CLI exit code 3).
struct CalibrationError : std::runtime_error {
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mav
