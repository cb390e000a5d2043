#include "mavtrack/integrator.hpp"

#include <algorithm>

#include "mavtrack/errors.hpp"

namespace mav {

FrameTap::FrameTap(Modality modality, double initial_rate,
                   FrameCallback on_frame, WarnCallback on_warn)
    : modality_(modality),
      on_frame_(std::move(on_frame)),
      on_warn_(std::move(on_warn)) {
  const RateBand band = modality_band(modality);
  rate_ = std::clamp(initial_rate, band.lo, band.hi);
  if (rate_ != initial_rate && on_warn_)
    on_warn_(std::string(modality_name(modality)) + " rate " +
             std::to_string(initial_rate) + " Hz clamped to band");
  pending_rate_ = rate_;
}

void FrameTap::set_rate(double f) {
  const RateBand band = modality_band(modality_);
  const double clamped = std::clamp(f, band.lo, band.hi);
  if (clamped != f && on_warn_)
    on_warn_(std::string(modality_name(modality_)) + " rate " +
             std::to_string(f) + " Hz clamped to band");
  pending_rate_ = clamped;
}

void FrameTap::open_frame(double t_start, const SensorPose& pose) {
  rate_ = pending_rate_;
  frame_ = Frame{};
  frame_.t_start = t_start;
  frame_.integration_time = 1.0 / rate_;
  frame_.modality = modality_;
  frame_.pose = pose;
  frame_.mid_pose = pose;
  open_ = true;
  mid_set_ = false;
}

void FrameTap::close_frame() {
  open_ = false;
  on_frame_(std::move(frame_));
}

void FrameTap::push_chunk(const std::vector<LidarPoint>& points, double t0,
                          double t1, const SensorPose& pose) {
  if (!(t1 > t0)) throw ConfigError("tap chunk must have positive length");
  if (!open_) open_frame(t0, pose);
  t_cursor_ = t1;
  // The pose nearest the frame midpoint becomes the frame's world transform.
  auto maybe_set_mid = [&]() {
    if (!mid_set_ &&
        frame_.t_start + 0.5 * frame_.integration_time < t1 + 1e-12) {
      frame_.mid_pose = pose;
      mid_set_ = true;
    }
  };
  maybe_set_mid();
  std::size_t i = 0;
  while (true) {
    const double boundary = frame_.t_start + frame_.integration_time;
    while (i < points.size() && points[i].t < boundary - 1e-12)
      frame_.points.push_back(points[i++]);
    if (boundary > t1 - 1e-12) break;
    close_frame();
    open_frame(boundary, pose);
    maybe_set_mid();
  }
}

void FrameTap::flush() {
  if (open_) close_frame();
}

std::vector<Frame> tap(const std::vector<LidarPoint>& stream, Modality modality,
                       const std::vector<std::pair<double, double>>& schedule,
                       double t_end, const SensorPose& pose,
                       std::vector<std::string>* warnings) {
  if (schedule.empty()) throw ConfigError("rate schedule must be nonempty");
  std::vector<Frame> frames;
  FrameTap t(
      modality, schedule.front().second,
      [&](Frame&& f) { frames.push_back(std::move(f)); },
      [&](const std::string& w) {
        if (warnings) warnings->push_back(w);
      });
  // Feed in sub-chunks split at schedule steps so each requested rate is
  // registered before the first boundary at or after its step time.
  std::vector<double> cuts{0.0};
  for (const auto& [ts, f] : schedule)
    if (ts > 0.0 && ts < t_end) cuts.push_back(ts);
  cuts.push_back(t_end);
  std::sort(cuts.begin(), cuts.end());
  std::size_t pi = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    if (!(b > a)) continue;
    double f = schedule.front().second;
    for (const auto& [ts, fr] : schedule)
      if (ts <= a + 1e-12) f = fr;
    t.set_rate(f);
    std::vector<LidarPoint> chunk;
    while (pi < stream.size() && stream[pi].t < b - 1e-12)
      chunk.push_back(stream[pi++]);
    t.push_chunk(chunk, a, b, pose);
  }
  t.flush();
  return frames;
}

}  // namespace mav
