#pragma once

#include <optional>
#include <vector>

#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/scene.hpp"
#include "mavtrack/types.hpp"

namespace mav {

/// Single-ray sensor model: nearest hit among ground, obstacles and the MAV
/// box, Gaussian range noise, reflectivity/distance dropout. `ray_index` keys
/// the noise substream so results are independent of evaluation order.
/// Returned point is in the sensor frame.
std::optional<LidarPoint> cast_ray(const Scene& scene, const SensorPose& pose,
                                   const RaySample& sample, const Vec3& mav_pos,
                                   std::int64_t ray_index);

/// Streaming simulator. The caller drives time forward in small chunks (the
/// carrier pose is held constant within a chunk) and consumes the surviving
/// returns; this keeps memory flat at high point rates.
class Simulator {
 public:
  Simulator(Scene scene, ScanPatternConfig pattern);

  /// Appends all surviving returns with timestamps in [t0, t1), sensor frame,
  /// timestamp-ordered. The MAV moves along its script within the chunk.
  void generate_chunk(double t0, double t1, const SensorPose& pose,
                      std::vector<LidarPoint>& out) const;

  const Scene& scene() const { return scene_; }
  const ScanPatternConfig& pattern() const { return pattern_; }

 private:
  Scene scene_;
  ScanPatternConfig pattern_;
};

/// Convenience one-shot stream generation with a static carrier pose
/// (testing; scenario runs use the chunked interface through the pipeline).
std::vector<LidarPoint> simulate_stream(const Scene& scene,
                                        const ScanPatternConfig& pattern,
                                        const SensorPose& pose,
                                        double duration);

}  // namespace mav
