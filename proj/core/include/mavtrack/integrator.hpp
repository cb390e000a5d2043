#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mavtrack/types.hpp"

namespace mav {

struct RateBand {
  double lo, hi;
};

inline RateBand modality_band(Modality m) {
  switch (m) {
    case Modality::HF: return {20.0, 100.0};
    case Modality::MF: return {5.0, 20.0};
    default: return {1e-3, 1.0};
  }
}

/// Splits the point stream into contiguous integration windows for one
/// modality. Rate changes requested while a frame is open apply at the next
/// frame boundary; out-of-band requests are clamped and reported through the
/// warning callback.
class FrameTap {
 public:
  using FrameCallback = std::function<void(Frame&&)>;
  using WarnCallback = std::function<void(const std::string&)>;

  FrameTap(Modality modality, double initial_rate, FrameCallback on_frame,
           WarnCallback on_warn = nullptr);

  /// Requested rate for frames after the next boundary.
  void set_rate(double f);

  /// Feeds the points of [t0, t1); chunks must be contiguous and
  /// timestamp-ordered. `pose` is the carrier pose over the chunk.
  void push_chunk(const std::vector<LidarPoint>& points, double t0, double t1,
                  const SensorPose& pose);

  /// Emits the open partial frame (if any). Call once at stream end.
  void flush();

  double current_rate() const { return rate_; }
  Modality modality() const { return modality_; }

 private:
  void open_frame(double t_start, const SensorPose& pose);
  void close_frame();

  Modality modality_;
  double rate_;
  double pending_rate_;
  FrameCallback on_frame_;
  WarnCallback on_warn_;
  Frame frame_;
  bool open_ = false;
  bool mid_set_ = false;
  double t_cursor_ = 0.0;
};

/// One-shot tap for tests: partitions a finished stream under a piecewise
/// constant rate schedule given as (t, rate) steps (first entry at t = 0).
std::vector<Frame> tap(const std::vector<LidarPoint>& stream, Modality modality,
                       const std::vector<std::pair<double, double>>& schedule,
                       double t_end, const SensorPose& pose = {},
                       std::vector<std::string>* warnings = nullptr);

}  // namespace mav
