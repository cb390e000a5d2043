#include <string>

#include "doctest.h"
#include "mavtrack/pipeline.hpp"

using namespace mav;

namespace {

// Reduced-rate variant of the circling scenario so the whole comparison fits
// in a unit-test budget.
const char* kScenario = R"({
  "name": "dominance",
  "duration": 30.0,
  "seed": 19,
  "mode": "adaptive",
  "scan_pattern": { "point_rate": 1800000.0 },
  "scene": {
    "has_ground": true,
    "obstacles": [
      { "center": [10.1, 0.0, 1.5], "half": [0.5, 6.0, 1.5], "reflectivity": 0.6 }
    ],
    "mav": {
      "half_extents": [0.09, 0.09, 0.025],
      "reflectivity": 0.3,
      "trajectory": {
        "kind": "circle",
        "center": [6.9, 0.0, 1.3],
        "radius": 2.0,
        "speed_start": 0.5,
        "speed_end": 2.5,
        "ramp_duration": 30.0,
        "start_angle": 3.141592653589793
      }
    }
  },
  "validation": { "enabled": false },
  "calibration": { "distances": [2, 3, 5, 7, 10, 13],
                   "frequencies": [5, 10, 20, 50, 100],
                   "repetitions": 10 }
})";

}  // namespace

TEST_CASE("adaptive rates track at least as long as any fixed rate") {
  const ScenarioConfig cfg = parse_scenario(kScenario);
  const DensityModel model = run_calibration(cfg);

  const RunResult adaptive = run_tracking(cfg, model, parse_mode("adaptive"));
  CHECK(adaptive.metrics.track_duration > 0.0);

  for (const char* mode : {"fixed:5", "fixed:10", "fixed:20"}) {
    const RunResult fixed = run_tracking(cfg, model, parse_mode(mode));
    // frame boundaries differ between taps; allow one slow-frame slack
    CHECK(adaptive.metrics.track_duration + 0.25 >=
          fixed.metrics.track_duration);
  }
}
