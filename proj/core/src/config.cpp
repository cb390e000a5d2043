#include "mavtrack/config.hpp"

#include <fstream>

#include "json.hpp"

#include "mavtrack/errors.hpp"

namespace mav {
namespace {

using json = nlohmann::json;

Vec3 get_vec3(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError("key '" + key + "' must be an array of 3 numbers");
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec3_if(const json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = get_vec3(j, key);
}

TrajectoryScript parse_trajectory(const json& j) {
  TrajectoryScript t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "line") {
    t.kind = TrajectoryScript::Kind::Line;
    t.start = get_vec3(j, "start");
    t.end = get_vec3(j, "end");
    read_if(j, "speed", t.speed);
  } else if (kind == "circle") {
    t.kind = TrajectoryScript::Kind::Circle;
    t.center = get_vec3(j, "center");
    t.radius = j.at("radius").get<double>();
    read_if(j, "speed_start", t.speed_start);
    read_if(j, "speed_end", t.speed_end);
    read_if(j, "ramp_duration", t.ramp_duration);
    read_if(j, "start_angle", t.start_angle);
  } else if (kind == "waypoint") {
    t.kind = TrajectoryScript::Kind::Waypoint;
    for (const auto& k : j.at("knots")) {
      TrajectoryScript::Knot knot;
      knot.t = k.at("t").get<double>();
      knot.p = get_vec3(k, "p");
      t.knots.push_back(knot);
    }
  } else {
    throw ConfigError("trajectory.kind must be line, circle, or waypoint (got '" +
                      kind + "')");
  }
  return t;
}

Scene parse_scene(const json& j) {
  Scene s;
  read_if(j, "has_ground", s.has_ground);
  read_if(j, "ground_z", s.ground_z);
  read_if(j, "ground_reflectivity", s.ground_reflectivity);
  if (j.contains("obstacles")) {
    for (const auto& o : j.at("obstacles")) {
      Obstacle ob;
      ob.box.center = get_vec3(o, "center");
      ob.box.half = get_vec3(o, "half");
      read_if(o, "reflectivity", ob.reflectivity);
      s.obstacles.push_back(ob);
    }
  }
  const auto& m = j.at("mav");
  read_vec3_if(m, "half_extents", s.mav.half_extents);
  read_if(m, "reflectivity", s.mav.reflectivity);
  s.mav.trajectory = parse_trajectory(m.at("trajectory"));
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    read_if(n, "range_sigma", s.noise.range_sigma);
    read_if(n, "dropout_alpha", s.noise.dropout_alpha);
    read_if(n, "dropout_r_max", s.noise.dropout_r_max);
    read_if(n, "dropout_p_max", s.noise.dropout_p_max);
    read_if(n, "dropout_enabled", s.noise.dropout_enabled);
    read_if(n, "near_surface_clutter_rate", s.noise.near_surface_clutter_rate);
    read_if(n, "clutter_trigger_distance", s.noise.clutter_trigger_distance);
  }
  return s;
}

}  // namespace

std::string RunMode::label() const {
  if (adaptive) return "adaptive";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fixed:%g", fixed_f);
  return buf;
}

RunMode parse_mode(const std::string& text) {
  if (text == "adaptive") return {true, 0.0};
  if (text.rfind("fixed:", 0) == 0) {
    const std::string num = text.substr(6);
    char* end = nullptr;
    const double f = std::strtod(num.c_str(), &end);
    if (end == nullptr || *end != '\0' || !(f > 0.0))
      throw ConfigError("mode 'fixed:<Hz>' needs a positive frequency (got '" +
                        text + "')");
    return {false, f};
  }
  throw ConfigError("mode must be 'adaptive' or 'fixed:<Hz>' (got '" + text + "')");
}

void ScenarioConfig::validate() const {
  if (!seed_set) throw ConfigError("key 'seed' is mandatory");
  if (!(duration > 0.0)) throw ConfigError("key 'duration' must be positive");
  parse_mode(mode);
  pattern.validate();
  scene.validate();
  tracker.validate();
  if (scene.mav.trajectory.duration < duration)
    throw ConfigError("trajectory.duration must cover the scenario duration");
  if (calibration.repetitions < 10)
    throw ConfigError("calibration.repetitions must be >= 10");
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario JSON parse failure: ") + e.what());
  }
  ScenarioConfig c;
  try {
    read_if(j, "name", c.name);
    c.duration = j.at("duration").get<double>();
    if (j.contains("seed")) {
      c.seed = j.at("seed").get<std::uint64_t>();
      c.seed_set = true;
    }
    read_if(j, "mode", c.mode);
    c.scene = parse_scene(j.at("scene"));
    c.scene.mav.trajectory.duration =
        std::max(c.scene.mav.trajectory.duration, c.duration);
    if (j.contains("scan_pattern")) {
      const auto& p = j.at("scan_pattern");
      read_if(p, "fov_h_deg", c.pattern.fov_h_deg);
      read_if(p, "fov_v_deg", c.pattern.fov_v_deg);
      read_if(p, "point_rate", c.pattern.point_rate);
      read_if(p, "petal_freq_a", c.pattern.petal_freq_a);
      if (p.contains("petal_freq_b"))
        c.pattern.petal_freq_b = p.at("petal_freq_b").get<double>();
      else
        c.pattern.petal_freq_b = c.pattern.petal_freq_a * kGoldenRatio;
      read_if(p, "phase", c.pattern.phase);
    }
    if (j.contains("tracker")) {
      const auto& t = j.at("tracker");
      read_if(t, "n_min_HF", c.tracker.thresholds.n_min_HF);
      read_if(t, "n_min_MF", c.tracker.thresholds.n_min_MF);
      read_if(t, "ground_margin", c.tracker.ground_margin);
      read_if(t, "search_radius_base", c.tracker.search_radius_base);
      read_if(t, "search_radius_speed_gain", c.tracker.search_radius_speed_gain);
      read_if(t, "beta", c.tracker.beta);
      read_if(t, "velocity_baseline", c.tracker.velocity_baseline);
      read_if(t, "lost_timeout", c.tracker.lost_timeout);
      read_if(t, "fov_margin_deg", c.tracker.fov_margin_deg);
      read_if(t, "v_max", c.tracker.v_max);
      read_if(t, "c_blur", c.tracker.c_blur);
      read_if(t, "extent_margin", c.tracker.extent_margin);
      read_if(t, "k_yaw", c.tracker.k_yaw);
      read_if(t, "yaw_rate_max", c.tracker.yaw_rate_max);
      read_if(t, "k_forward", c.tracker.k_forward);
      read_if(t, "forward_max", c.tracker.forward_max);
    }
    c.tracker.ground_z = c.scene.ground_z;
    c.tracker.mav_diameter = 2.0 * c.scene.mav.half_extents.norm();
    if (j.contains("ugv")) {
      const auto& u = j.at("ugv");
      read_if(u, "x", c.ugv.x);
      read_if(u, "y", c.ugv.y);
      read_if(u, "yaw", c.ugv.yaw);
      read_if(u, "sensor_height", c.ugv.sensor_height);
    }
    if (j.contains("rates")) {
      const auto& r = j.at("rates");
      read_if(r, "f_HF", c.initial_rates.f_HF);
      read_if(r, "f_MF", c.initial_rates.f_MF);
      read_if(r, "f_LF", c.initial_rates.f_LF);
    }
    if (j.contains("validation")) {
      const auto& v = j.at("validation");
      read_if(v, "enabled", c.validation.enabled);
      read_if(v, "voxel_size", c.validation.validator.voxel_size);
      read_if(v, "threshold", c.validation.validator.threshold);
      read_if(v, "sweep_step", c.validation.validator.sweep_step);
      read_if(v, "corridor_radius", c.validation.validator.corridor_radius);
    }
    if (j.contains("calibration")) {
      const auto& k = j.at("calibration");
      read_if(k, "distances", c.calibration.distances);
      read_if(k, "frequencies", c.calibration.frequencies);
      read_if(k, "repetitions", c.calibration.repetitions);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario config error: ") + e.what());
  }
  c.scene.noise.seed = c.seed;
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read scenario config " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

}  // namespace mav
