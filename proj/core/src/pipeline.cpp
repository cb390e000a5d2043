#include "mavtrack/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "mavtrack/errors.hpp"
#include "mavtrack/integrator.hpp"
#include "mavtrack/simulator.hpp"

namespace mav {
namespace {

using ordered_json = nlohmann::ordered_json;
constexpr double kChunk = 0.005;

const char* source_name(EstimateSource s) {
  switch (s) {
    case EstimateSource::HF: return "HF";
    case EstimateSource::MF: return "MF";
    default: return "fused";
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double rmse_of(const std::vector<double>& errs) {
  if (errs.empty()) return 0.0;
  double s = 0.0;
  for (double e : errs) s += e * e;
  return std::sqrt(s / errs.size());
}

}  // namespace

RunResult run_tracking(const ScenarioConfig& cfg, const DensityModel& model,
                       const RunMode& mode) {
  cfg.validate();
  if (!model.calibrated())
    throw ConfigError("tracking requires a calibrated density model");

  Scene scene = cfg.scene;
  scene.noise.seed = cfg.seed;
  const Simulator sim(scene, cfg.pattern);
  const TrajectoryScript& traj = scene.mav.trajectory;

  RunResult res;
  res.mode = mode.label();

  RateSet rates = cfg.initial_rates;
  if (!mode.adaptive) {
    rates.f_MF = std::clamp(mode.fixed_f, 5.0, 20.0);
    rates.f_HF = std::clamp(mode.fixed_f, 20.0, 100.0);
  }
  Tracker tracker(cfg.tracker, &model, cfg.pattern, cfg.ugv.sensor_height,
                  mode.adaptive, rates);
  {
    const KinematicSample k0 = eval_trajectory(traj, 0.0);
    MavState s0;
    s0.p = k0.p;
    s0.v = k0.v;
    s0.t = 0.0;
    s0.n_points = 1;
    tracker.init(s0);
  }

  UgvState ugv;
  ugv.x = cfg.ugv.x;
  ugv.y = cfg.ugv.y;
  ugv.yaw = cfg.ugv.yaw;

  std::vector<Frame> pending;
  auto on_frame = [&](Frame&& f) {
    res.frame_stats.push_back({f.modality, f.t_start, f.integration_time,
                               static_cast<int>(f.points.size())});
    pending.push_back(std::move(f));
  };
  auto on_warn = [&](const std::string& w) { res.warnings.push_back(w); };

  std::vector<FrameTap> taps;
  taps.reserve(2);
  const bool fixed_is_hf = !mode.adaptive && mode.fixed_f >= 20.0;
  if (mode.adaptive) {
    taps.emplace_back(Modality::HF, rates.f_HF, on_frame, on_warn);
    taps.emplace_back(Modality::MF, rates.f_MF, on_frame, on_warn);
  } else {
    taps.emplace_back(fixed_is_hf ? Modality::HF : Modality::MF, mode.fixed_f,
                      on_frame, on_warn);
  }

  // Low-frequency accumulation: a corridor filter around the current track
  // keeps memory flat at full point rate.
  const double lf_period = 1.0 / rates.f_LF;
  const double keep_radius = cfg.validation.validator.corridor_radius + 0.2;
  double next_lf = lf_period;
  double lf_window_start = 0.0;
  std::vector<LidarPoint> lf_points;  // world frame
  std::vector<std::pair<double, SensorPose>> window_poses;

  std::vector<LidarPoint> chunk;
  double next_gt = 0.0;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration / kChunk));

  std::size_t raw_seen = 0, fused_seen = 0;
  auto emit_rows = [&]() {
    const TrackRecord& rec = tracker.record();
    const RateSet& r = tracker.rates();
    while (raw_seen < rec.raw.size() || fused_seen < rec.fused.size()) {
      const bool take_raw =
          raw_seen < rec.raw.size() &&
          (fused_seen >= rec.fused.size() ||
           rec.raw[raw_seen].t <= rec.fused[fused_seen].t);
      const MavState& s = take_raw ? rec.raw[raw_seen] : rec.fused[fused_seen];
      res.track_rows.push_back({s.t, source_name(s.source), s.p, s.v,
                                s.n_points, r.f_HF, r.f_MF, 0});
      (take_raw ? raw_seen : fused_seen) += 1;
    }
  };

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t0 = static_cast<double>(step) * kChunk;
    const double t1 = std::min(t0 + kChunk, cfg.duration);
    const SensorPose pose = ugv.sensor_pose(cfg.ugv.sensor_height);

    if (t0 + 1e-9 >= next_gt) {
      const KinematicSample k = eval_trajectory(traj, t0);
      res.ground_truth.push_back({t0, k.p, k.v, ugv.x, ugv.y, ugv.yaw});
      next_gt += 0.01;
    }
    window_poses.emplace_back(t0, pose);

    chunk.clear();
    sim.generate_chunk(t0, t1, pose, chunk);
    for (FrameTap& tap : taps) tap.push_chunk(chunk, t0, t1, pose);

    // Corridor-filtered low-frequency accumulation.
    if (cfg.validation.enabled) {
      const Vec3 anchor = tracker.last_state().p;
      for (const LidarPoint& p : chunk) {
        const Vec3 w = pose.to_world(p.position);
        if ((w - anchor).norm() <= keep_radius)
          lf_points.push_back({w, p.t});
      }
    }

    std::sort(pending.begin(), pending.end(), [](const Frame& a, const Frame& b) {
      if (a.t_end() != b.t_end()) return a.t_end() < b.t_end();
      return a.modality == Modality::MF && b.modality == Modality::HF;
    });
    for (const Frame& f : pending) {
      if (tracker.lost()) break;
      tracker.process_frame(f, ugv);
      emit_rows();
    }
    pending.clear();
    if (tracker.lost()) break;

    if (mode.adaptive) {
      taps[0].set_rate(tracker.rates().f_HF);
      taps[1].set_rate(tracker.rates().f_MF);
    }
    const UgvCommand cmd = tracker.command();
    ugv.yaw_rate = cmd.yaw_rate;
    ugv.vx = cmd.forward * std::cos(ugv.yaw);
    ugv.vy = cmd.forward * std::sin(ugv.yaw);
    ugv.yaw = wrap_angle(ugv.yaw + cmd.yaw_rate * (t1 - t0));
    ugv.x += ugv.vx * (t1 - t0);
    ugv.y += ugv.vy * (t1 - t0);

    if (cfg.validation.enabled && t1 + 1e-9 >= next_lf) {
      try {
        res.validations.push_back(validate(
            lf_points, lf_window_start, t1, tracker.record().fused, model,
            window_poses, scene.mav.half_extents, tracker.rates().f_LF,
            cfg.validation.validator));
      } catch (const std::invalid_argument& e) {
        res.warnings.push_back(std::string("validation skipped: ") + e.what());
      }
      lf_points.clear();
      window_poses.clear();
      lf_window_start = t1;
      next_lf += lf_period;
    }
  }

  res.record = tracker.record();
  if (res.record.lost && !res.track_rows.empty()) res.track_rows.back().lost = 1;

  RunMetrics& m = res.metrics;
  m.lost = res.record.lost;
  m.lost_t = res.record.lost_t;
  m.track_duration =
      res.record.fused.empty() ? 0.0 : res.record.fused.back().t;
  std::vector<double> e_fused, e_hf, e_mf;
  for (const MavState& s : res.record.fused) {
    const double err =
        (s.p - eval_trajectory(traj, std::min(s.t, cfg.duration)).p).norm();
    e_fused.push_back(err);
  }
  for (const MavState& s : res.record.raw) {
    const double err =
        (s.p - eval_trajectory(traj, std::min(s.t, cfg.duration)).p).norm();
    (s.source == EstimateSource::HF ? e_hf : e_mf).push_back(err);
  }
  if (!e_fused.empty()) {
    double sum = 0.0;
    for (double e : e_fused) sum += e;
    m.mean_position_error = sum / e_fused.size();
  }
  m.rmse_fused = rmse_of(e_fused);
  m.rmse_HF = rmse_of(e_hf);
  m.rmse_MF = rmse_of(e_mf);
  if (!res.record.diagnostics.empty()) {
    std::size_t misses = 0;
    for (const FrameDiagnostics& d : res.record.diagnostics)
      if (!d.accepted) ++misses;
    m.miss_rate = static_cast<double>(misses) / res.record.diagnostics.size();
  }
  const double t_final = m.lost ? m.lost_t : cfg.duration;
  m.revolutions = circle_revolutions(traj, t_final);
  m.n_validations = static_cast<int>(res.validations.size());
  for (const ValidationReport& v : res.validations)
    if (v.accepted) ++m.n_validations_accepted;
  return res;
}

DensityModel run_calibration(const ScenarioConfig& cfg) {
  cfg.validate();
  Scene free_space = cfg.scene;
  free_space.obstacles.clear();
  free_space.has_ground = false;
  free_space.noise.near_surface_clutter_rate = 0.0;
  DensityModel model =
      calibrate(free_space, cfg.pattern, cfg.calibration.distances,
                cfg.calibration.frequencies, cfg.calibration.repetitions,
                cfg.seed, cfg.ugv.sensor_height);
  // The densest cell (nearest distance, slowest rate) must at least clear the
  // mid-rate count threshold, or no feasible rate exists anywhere.
  const double best = model
                          .expected_count(cfg.calibration.distances.front(),
                                          cfg.calibration.frequencies.front())
                          .mu;
  if (best < cfg.tracker.thresholds.n_min_MF)
    throw CalibrationError(
        "density too low to track: peak expected count " +
        std::to_string(best) + " is below the required " +
        std::to_string(cfg.tracker.thresholds.n_min_MF));
  return model;
}

void write_outputs(const RunResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    std::ofstream f(dir / "track.csv", std::ios::binary);
    f << "t,modality,px,py,pz,vx,vy,vz,n_points,f_HF,f_MF,lost\n";
    for (const TrackRow& r : res.track_rows)
      f << fmt(r.t) << ',' << r.modality << ',' << fmt(r.p.x()) << ','
        << fmt(r.p.y()) << ',' << fmt(r.p.z()) << ',' << fmt(r.v.x()) << ','
        << fmt(r.v.y()) << ',' << fmt(r.v.z()) << ',' << r.n_points << ','
        << fmt(r.f_HF) << ',' << fmt(r.f_MF) << ',' << r.lost << '\n';
  }
  {
    std::ofstream f(dir / "ground_truth.csv", std::ios::binary);
    f << "t,px,py,pz,vx,vy,vz,qx,qy,qyaw\n";
    for (const GroundTruthRow& r : res.ground_truth)
      f << fmt(r.t) << ',' << fmt(r.p.x()) << ',' << fmt(r.p.y()) << ','
        << fmt(r.p.z()) << ',' << fmt(r.v.x()) << ',' << fmt(r.v.y()) << ','
        << fmt(r.v.z()) << ',' << fmt(r.qx) << ',' << fmt(r.qy) << ','
        << fmt(r.qyaw) << '\n';
  }
  {
    std::ofstream f(dir / "frames.csv", std::ios::binary);
    f << "modality,t_start,integration_time,n_points\n";
    for (const FrameStat& s : res.frame_stats)
      f << modality_name(s.modality) << ',' << fmt(s.t_start) << ','
        << fmt(s.integration_time) << ',' << s.n_points << '\n';
  }
  {
    std::ofstream f(dir / "spacing.csv", std::ios::binary);
    f << "t,modality,spacing,dt\n";
    const MavState* last_hf = nullptr;
    const MavState* last_mf = nullptr;
    for (const MavState& s : res.record.raw) {
      const MavState*& last =
          s.source == EstimateSource::HF ? last_hf : last_mf;
      if (last != nullptr)
        f << fmt(s.t) << ',' << source_name(s.source) << ','
          << fmt((s.p - last->p).norm()) << ',' << fmt(s.t - last->t) << '\n';
      last = &s;
    }
  }
  {
    ordered_json j;
    j["mode"] = res.mode;
    j["lost"] = res.metrics.lost;
    j["lost_t"] = res.metrics.lost_t;
    j["track_duration"] = res.metrics.track_duration;
    j["mean_position_error"] = res.metrics.mean_position_error;
    j["rmse_fused"] = res.metrics.rmse_fused;
    j["rmse_HF"] = res.metrics.rmse_HF;
    j["rmse_MF"] = res.metrics.rmse_MF;
    j["miss_rate"] = res.metrics.miss_rate;
    j["revolutions"] = res.metrics.revolutions;
    j["n_fused"] = res.record.fused.size();
    j["n_frames"] = res.record.diagnostics.size();
    ordered_json vals = ordered_json::array();
    for (const ValidationReport& v : res.validations) {
      ordered_json e;
      e["t0"] = v.t0;
      e["t1"] = v.t1;
      e["iou"] = v.iou;
      e["threshold"] = v.threshold;
      e["accepted"] = v.accepted;
      e["n_expected_voxels"] = v.n_expected_voxels;
      e["n_observed_voxels"] = v.n_observed_voxels;
      e["n_corridor_points"] = v.n_corridor_points;
      vals.push_back(e);
    }
    j["validations"] = vals;
    j["warnings"] = res.warnings;
    std::ofstream f(dir / "diagnostics.json", std::ios::binary);
    f << j.dump(2) << '\n';
  }
}

void write_model_csv(const DensityModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << "d,f,mu,sigma\n";
  for (std::size_t i = 0; i < model.distances().size(); ++i)
    for (std::size_t k = 0; k < model.frequencies().size(); ++k)
      f << fmt(model.distances()[i]) << ',' << fmt(model.frequencies()[k])
        << ',' << fmt(model.mu()[i][k]) << ',' << fmt(model.sigma()[i][k])
        << '\n';
}

}  // namespace mav
