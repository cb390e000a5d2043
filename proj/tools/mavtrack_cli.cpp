#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mavtrack/errors.hpp"
#include "mavtrack/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& mode) {
  std::string s = mode;
  for (char& c : s)
    if (c == ':') c = '_';
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

mav::ScenarioConfig load_config(const std::string& path, bool seed_given,
                                std::uint64_t seed,
                                const std::string& mode_override) {
  mav::ScenarioConfig cfg = mav::load_scenario(path);
  if (seed_given) {
    cfg.seed = seed;
    cfg.scene.noise.seed = seed;
  }
  if (!mode_override.empty()) {
    mav::parse_mode(mode_override);  // throws ConfigError if malformed
    cfg.mode = mode_override;
  }
  return cfg;
}

int run_calibrate(const std::string& config_path, const std::string& model_path,
                  const std::string& out_dir, bool seed_given,
                  std::uint64_t seed) {
  const mav::ScenarioConfig cfg =
      load_config(config_path, seed_given, seed, "");
  const mav::DensityModel model = mav::run_calibration(cfg);
  fs::create_directories(out_dir);
  const std::string model_out =
      model_path.empty() ? (fs::path(out_dir) / "model.json").string()
                         : model_path;
  model.save(model_out);
  mav::write_model_csv(model, (fs::path(out_dir) / "density.csv").string());
  std::cout << "calibrated " << model.distances().size() << "x"
            << model.frequencies().size() << " density table -> " << model_out
            << "\n";
  return 0;
}

int run_track(const std::string& config_path, const std::string& model_path,
              const std::string& out_dir, bool seed_given, std::uint64_t seed,
              const std::string& mode_override) {
  if (model_path.empty())
    throw mav::ConfigError("track requires --model <path> (run 'calibrate' first)");
  const mav::ScenarioConfig cfg =
      load_config(config_path, seed_given, seed, mode_override);
  const mav::DensityModel model = mav::DensityModel::load(model_path);
  const mav::RunMode mode = mav::parse_mode(cfg.mode);
  const mav::RunResult res = mav::run_tracking(cfg, model, mode);
  mav::write_outputs(res, out_dir);
  std::cout << "mode=" << res.mode << " track_duration="
            << fmt(res.metrics.track_duration)
            << " lost=" << (res.metrics.lost ? 1 : 0)
            << " mean_err=" << fmt(res.metrics.mean_position_error) << "\n";
  return 0;
}

int run_compare(const std::string& config_path, const std::string& model_path,
                const std::string& out_dir, bool seed_given, std::uint64_t seed,
                const std::vector<std::string>& modes) {
  if (model_path.empty())
    throw mav::ConfigError("compare requires --model <path>");
  if (modes.empty())
    throw mav::ConfigError("compare requires at least one --mode");
  const mav::DensityModel model = mav::DensityModel::load(model_path);

  std::vector<std::string> unique_modes;
  for (const std::string& m : modes) {
    mav::parse_mode(m);
    if (std::find(unique_modes.begin(), unique_modes.end(), m) ==
        unique_modes.end())
      unique_modes.push_back(m);
  }
  fs::create_directories(out_dir);
  std::ofstream table(fs::path(out_dir) / "comparison.csv", std::ios::binary);
  table << "mode,track_duration,lost,lost_t,mean_position_error,rmse_fused,"
           "miss_rate,revolutions\n";
  for (const std::string& m : unique_modes) {
    const mav::ScenarioConfig cfg = load_config(config_path, seed_given, seed, m);
    const mav::RunResult res =
        mav::run_tracking(cfg, model, mav::parse_mode(m));
    mav::write_outputs(res, (fs::path(out_dir) / sanitize(m)).string());
    table << m << ',' << fmt(res.metrics.track_duration) << ','
          << (res.metrics.lost ? 1 : 0) << ',' << fmt(res.metrics.lost_t)
          << ',' << fmt(res.metrics.mean_position_error) << ','
          << fmt(res.metrics.rmse_fused) << ',' << fmt(res.metrics.miss_rate)
          << ',' << fmt(res.metrics.revolutions) << '\n';
    std::cout << m << ": duration=" << fmt(res.metrics.track_duration)
              << " lost=" << (res.metrics.lost ? 1 : 0) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-rate lidar MAV tracking simulator"};
  app.require_subcommand(1);

  std::string config_path, model_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string mode_override;
  std::vector<std::string> modes;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", config_path, "scenario config JSON");
    if (need_config) c->required();
    sub->add_option("--model", model_path, "density model JSON");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* cal = app.add_subcommand("calibrate", "build the density model");
  add_common(cal, true);
  CLI::App* trk = app.add_subcommand("track", "run a tracking scenario");
  add_common(trk, true);
  trk->add_option("--mode", mode_override, "adaptive or fixed:<Hz>");
  CLI::App* cmp = app.add_subcommand("compare", "run one scenario under several modes");
  add_common(cmp, true);
  cmp->add_option("--mode", modes, "adaptive or fixed:<Hz> (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cal->parsed())
      return run_calibrate(config_path, model_path, out_dir, seed_given, seed);
    if (trk->parsed())
      return run_track(config_path, model_path, out_dir, seed_given, seed,
                       mode_override);
    return run_compare(config_path, model_path, out_dir, seed_given, seed,
                       modes);
  } catch (const mav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mav::CalibrationError& e) {
    std::cerr << "calibration failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
