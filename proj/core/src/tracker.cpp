#include "mavtrack/tracker.hpp"

#include <algorithm>

#include "mavtrack/errors.hpp"
#include "mavtrack/kdtree.hpp"

namespace mav {

void TrackerConfig::validate() const {
  if (!(ground_margin > 0.0 && search_radius_base > 0.0 &&
        search_radius_speed_gain > 0.0 && lost_timeout > 0.0 &&
        fov_margin_deg > 0.0 && mav_diameter > 0.0 && extent_margin > 0.0))
    throw ConfigError("tracker lengths/margins must be positive");
  if (!(thresholds.n_min_MF > thresholds.n_min_HF && thresholds.n_min_HF >= 1))
    throw ConfigError("tracker thresholds require n_min_MF > n_min_HF >= 1");
  if (!(beta > 0.0 && beta <= 1.0))
    throw ConfigError("tracker.beta must be in (0, 1]");
}

Frame ground_removal(const Frame& frame, double ground_z, double ground_margin,
                     double last_mav_altitude) {
  const double cut = std::min(ground_z + ground_margin,
                              last_mav_altitude - ground_margin);
  Frame out = frame;
  out.points.clear();
  out.points.reserve(frame.points.size());
  for (const LidarPoint& p : frame.points) {
    const double z = p.position.z() + frame.mid_pose.origin.z();
    if (z >= cut) out.points.push_back(p);
  }
  return out;
}

Vec3 predict(const Vec3& p_prev, const Vec3& v_prev, double f) {
  if (!(f > 0.0)) throw ConfigError("prediction frequency must be positive");
  return p_prev + v_prev / f;
}

Vec3 centroid(const std::vector<Vec3>& points) {
  if (points.empty())
    throw std::invalid_argument("centroid of an empty point set");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

MavState fuse(const std::optional<MavState>& est_MF,
              const std::optional<MavState>& est_HF) {
  if (!est_MF && !est_HF)
    throw std::invalid_argument("fuse requires at least one estimate");
  if (!est_MF) {
    MavState s = *est_HF;
    s.source = EstimateSource::Fused;
    return s;
  }
  if (!est_HF) {
    MavState s = *est_MF;
    s.source = EstimateSource::Fused;
    return s;
  }
  const double w_mf = est_MF->n_points, w_hf = est_HF->n_points;
  MavState s;
  s.p = (w_mf * est_MF->p + w_hf * est_HF->p) / (w_mf + w_hf);
  s.t = std::max(est_MF->t, est_HF->t);
  s.n_points = est_MF->n_points + est_HF->n_points;
  s.v = est_MF->t > est_HF->t ? est_MF->v : est_HF->v;
  s.source = EstimateSource::Fused;
  return s;
}

RateSet adjust_rates(const MavState& state, const SensorPose& sensor,
                     const DensityModel& model, const CountThresholds& thr,
                     const TrackerConfig& cfg) {
  const double d = (state.p - sensor.origin).norm();
  RateSet r;
  const FrequencyChoice mf =
      model.min_frequency_for_count(d, thr.n_min_MF, 5.0, 20.0);
  r.f_MF = mf.f;
  r.density_flag_MF = !mf.feasible;
  const FrequencyChoice hf =
      model.min_frequency_for_count(d, thr.n_min_HF, 20.0, 100.0);
  r.density_flag_HF = !hf.feasible;
  // The blur bound is a floor: per-frame displacement must stay below
  // c_blur target diameters, so f >= |v| / (c_blur * diameter).
  const double f_blur = state.v.norm() / (cfg.c_blur * cfg.mav_diameter);
  r.f_HF = std::clamp(std::max(hf.f, f_blur), 20.0, 100.0);
  r.f_LF = 0.5;
  return r;
}

UgvCommand ugv_control(const MavState& state, const UgvState& ugv,
                       const ScanPatternConfig& fov, double fov_margin_deg,
                       const TrackerConfig& cfg, double sensor_height) {
  const SensorPose pose = ugv.sensor_pose(sensor_height);
  const Vec3 rel = pose.to_sensor(state.p);
  const double az = azimuth_of(rel);
  const double el = elevation_of(rel);
  UgvCommand cmd;
  cmd.yaw_rate = std::clamp(cfg.k_yaw * az, -cfg.yaw_rate_max, cfg.yaw_rate_max);
  // Back away when the target's elevation nears the vertical FoV edge;
  // shrinking only happens through distance since the mount has no tilt.
  const double edge = deg2rad(0.5 * fov.fov_v_deg - fov_margin_deg);
  const double overflow = std::abs(el) - edge;
  if (overflow > 0.0)
    cmd.forward = std::clamp(-cfg.k_forward * overflow * rel.norm(),
                             -cfg.forward_max, cfg.forward_max);
  return cmd;
}

Tracker::Tracker(TrackerConfig cfg, const DensityModel* model,
                 const ScanPatternConfig& fov, double sensor_height,
                 bool adaptive, RateSet initial_rates)
    : cfg_(cfg),
      model_(model),
      fov_(fov),
      sensor_height_(sensor_height),
      adaptive_(adaptive),
      rates_(initial_rates) {
  cfg_.validate();
  if (adaptive_ && (model_ == nullptr || !model_->calibrated()))
    throw std::logic_error("adaptive tracking requires a calibrated density model");
}

void Tracker::init(const MavState& s0) {
  last_ = s0;
  v_smoothed_ = s0.v;
  have_state_ = true;
  last_accept_t_ = s0.t;
  pos_history_.clear();
  pos_history_.emplace_back(s0.t, s0.p);
}

std::optional<MavState> Tracker::extract_estimate(const Frame& frame,
                                                  const UgvState& ugv) {
  (void)ugv;
  const double f = 1.0 / frame.integration_time;
  const double speed = v_smoothed_.norm();
  const double radius = cfg_.search_radius_base +
                        cfg_.search_radius_speed_gain * speed / f;
  // Coast the last fused state to the frame midpoint (the per-frame formula
  // p + v/f generalizes to miss streaks this way).
  const double t_mid = frame.t_start + 0.5 * frame.integration_time;
  const Vec3 p_hat = last_.p + v_smoothed_ * (t_mid - last_.t);

  FrameDiagnostics diag;
  diag.t_end = frame.t_end();
  diag.modality = frame.modality;
  diag.radius = radius;
  if (model_ && model_->calibrated()) {
    const double d = (p_hat - frame.mid_pose.origin).norm();
    diag.expected_mu = model_->expected_count(d, f).mu;
  }

  // Ground removal + crop to the search ball's bounding box, in one pass;
  // the crop preserves radius-query results exactly.
  const double cut = std::min(cfg_.ground_z + cfg_.ground_margin,
                              last_.p.z() - cfg_.ground_margin);
  std::vector<Vec3> candidates;
  for (const LidarPoint& lp : frame.points) {
    const Vec3 w = frame.mid_pose.to_world(lp.position);
    if (w.z() < cut) continue;
    if (std::abs(w.x() - p_hat.x()) > radius ||
        std::abs(w.y() - p_hat.y()) > radius ||
        std::abs(w.z() - p_hat.z()) > radius)
      continue;
    candidates.push_back(w);
  }

  KdTree tree(std::move(candidates));
  const std::vector<std::size_t> hits = tree.radius_query(p_hat, radius);
  diag.n_points = static_cast<int>(hits.size());
  if (hits.empty()) {
    record_.diagnostics.push_back(diag);
    return std::nullopt;
  }
  std::vector<Vec3> cluster;
  cluster.reserve(hits.size());
  Vec3 lo = tree.point(hits[0]), hi = lo;
  for (std::size_t i : hits) {
    cluster.push_back(tree.point(i));
    lo = lo.cwiseMin(cluster.back());
    hi = hi.cwiseMax(cluster.back());
  }
  diag.extent = (hi - lo).norm();

  // Reject clusters wider than the target plus its expected motion smear:
  // such clusters have ingested surrounding structure (walls, ground edges)
  // and their centroid no longer describes the target.
  const double smear = speed * frame.integration_time;
  const double extent_gate = cfg_.mav_diameter + smear + cfg_.extent_margin;
  const int n_min = cfg_.thresholds.n_min_HF;  // reliability floor
  if (diag.extent > extent_gate || diag.n_points < n_min) {
    record_.diagnostics.push_back(diag);
    return std::nullopt;
  }

  MavState est;
  est.p = centroid(cluster);
  est.t = frame.t_end();
  est.n_points = diag.n_points;
  est.v = v_smoothed_;
  est.source =
      frame.modality == Modality::HF ? EstimateSource::HF : EstimateSource::MF;
  diag.accepted = true;
  record_.diagnostics.push_back(diag);
  return est;
}

Vec3 Tracker::smoothed_velocity(const Vec3& p, double t) {
  pos_history_.emplace_back(t, p);
  while (pos_history_.size() > 2 &&
         pos_history_.front().first < t - cfg_.velocity_baseline - 1e-9)
    pos_history_.pop_front();
  const auto& [t0, p0] = pos_history_.front();
  if (t - t0 < 1e-6) return v_smoothed_;
  const Vec3 raw = (p - p0) / (t - t0);
  Vec3 v = cfg_.beta * raw + (1.0 - cfg_.beta) * v_smoothed_;
  const double n = v.norm();
  if (n > cfg_.v_max) v *= cfg_.v_max / n;
  return v;
}

void Tracker::update_fused(const MavState& candidate) {
  MavState s = candidate;
  s.v = smoothed_velocity(s.p, s.t);
  v_smoothed_ = s.v;
  last_ = s;
  record_.fused.push_back(s);
}

void Tracker::process_frame(const Frame& frame, const UgvState& ugv) {
  if (!have_state_)
    throw std::logic_error("tracker used before init()");
  if (record_.lost) return;

  std::optional<MavState> est = extract_estimate(frame, ugv);
  if (est) {
    record_.raw.push_back(*est);
    last_accept_t_ = est->t;
    if (frame.modality == Modality::MF) {
      latest_MF_ = est;
      // MF alone carries the track when HF has been silent for over a period.
      if (!latest_HF_ || latest_HF_->t < est->t - 1.5 / rates_.f_HF)
        update_fused(fuse(latest_MF_, std::nullopt));
    } else if (frame.modality == Modality::HF) {
      latest_HF_ = est;
      std::optional<MavState> mf = latest_MF_;
      if (mf && mf->t < est->t - 2.5 / rates_.f_MF) mf.reset();  // stale
      update_fused(fuse(mf, latest_HF_));
    }
  } else if (frame.t_end() - last_accept_t_ > cfg_.lost_timeout) {
    record_.lost = true;
    record_.lost_t = frame.t_end();
    return;
  }

  if (adaptive_ && est) {
    rates_ = adjust_rates(last_, ugv.sensor_pose(sensor_height_), *model_,
                          cfg_.thresholds, cfg_);
  }
  command_ = ugv_control(last_, ugv, fov_, cfg_.fov_margin_deg, cfg_,
                         sensor_height_);
}

}  // namespace mav
