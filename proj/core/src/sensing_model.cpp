#include "mavtrack/sensing_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "mavtrack/errors.hpp"
#include "mavtrack/simulator.hpp"

namespace mav {
namespace {

using ordered_json = nlohmann::ordered_json;

void check_grid(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw ConfigError(std::string(name) + " ladder must be nonempty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw ConfigError(std::string(name) + " ladder must be strictly increasing");
  if (v.front() <= 0.0)
    throw ConfigError(std::string(name) + " ladder must be positive");
}

// Linear interpolation coordinate of x in ascending grid g, clamped.
std::pair<std::size_t, double> locate(const std::vector<double>& g, double x,
                                      bool& clamped) {
  if (x <= g.front()) {
    clamped |= x < g.front() - 1e-12;
    return {0, 0.0};
  }
  if (x >= g.back()) {
    clamped |= x > g.back() + 1e-12;
    return {g.size() - 1, 0.0};
  }
  std::size_t i =
      static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) -
                               g.begin()) - 1;
  return {i, (x - g[i]) / (g[i + 1] - g[i])};
}

// PAV on one sequence, enforcing nonincreasing order.
void pav_nonincreasing(std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> level(n), weight(n);
  std::vector<std::size_t> count(n);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    level[m] = y[i];
    weight[m] = 1.0;
    count[m] = 1;
    ++m;
    while (m > 1 && level[m - 2] < level[m - 1]) {
      const double w = weight[m - 2] + weight[m - 1];
      level[m - 2] = (level[m - 2] * weight[m - 2] + level[m - 1] * weight[m - 1]) / w;
      weight[m - 2] = w;
      count[m - 2] += count[m - 1];
      --m;
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < m; ++b)
    for (std::size_t j = 0; j < count[b]; ++j) y[k++] = level[b];
}

}  // namespace

void isotonic_smooth(std::vector<std::vector<double>>& table) {
  if (table.empty()) return;
  const std::size_t nd = table.size(), nf = table[0].size();
  for (int pass = 0; pass < 50; ++pass) {
    // rows: nonincreasing in f at fixed d
    for (auto& row : table) pav_nonincreasing(row);
    // columns: nonincreasing in d at fixed f
    bool violated = false;
    std::vector<double> col(nd);
    for (std::size_t j = 0; j < nf; ++j) {
      for (std::size_t i = 0; i < nd; ++i) col[i] = table[i][j];
      pav_nonincreasing(col);
      for (std::size_t i = 0; i < nd; ++i) {
        if (col[i] != table[i][j]) violated = true;
        table[i][j] = col[i];
      }
    }
    // check rows again; stop when both directions hold
    bool row_ok = true;
    for (const auto& row : table)
      for (std::size_t j = 1; j < nf; ++j)
        if (row[j] > row[j - 1] + 1e-12) row_ok = false;
    if (!violated && row_ok) return;
    if (row_ok) return;
  }
}

DensityModel::DensityModel(std::vector<double> distances,
                           std::vector<double> frequencies,
                           std::vector<std::vector<double>> mu,
                           std::vector<std::vector<double>> sigma)
    : distances_(std::move(distances)),
      frequencies_(std::move(frequencies)),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)) {
  check_grid(distances_, "distance");
  check_grid(frequencies_, "frequency");
  if (mu_.size() != distances_.size() || sigma_.size() != distances_.size())
    throw ConfigError("density model table rows must match the distance ladder");
  for (const auto& row : mu_)
    if (row.size() != frequencies_.size())
      throw ConfigError("density model table columns must match the frequency ladder");
  for (const auto& row : sigma_)
    if (row.size() != frequencies_.size())
      throw ConfigError("density model table columns must match the frequency ladder");
}

CountEstimate DensityModel::expected_count(double d, double f) const {
  if (!calibrated()) throw std::logic_error("density model queried before calibration");
  CountEstimate out;
  // Interpolation runs in (d, 1/f): point budget is linear in integration
  // time to first order.
  std::vector<double> inv_f(frequencies_.size());
  for (std::size_t i = 0; i < inv_f.size(); ++i)
    inv_f[i] = 1.0 / frequencies_[frequencies_.size() - 1 - i];
  auto [di, du] = locate(distances_, d, out.clamped);
  auto [fi, fu] = locate(inv_f, 1.0 / f, out.clamped);
  const std::size_t j0 = frequencies_.size() - 1 - fi;
  const std::size_t j1 = fi + 1 < inv_f.size() ? j0 - 1 : j0;
  const std::size_t i0 = di;
  const std::size_t i1 = di + 1 < distances_.size() ? di + 1 : di;
  auto bilerp = [&](const std::vector<std::vector<double>>& t) {
    const double a = t[i0][j0] * (1 - fu) + t[i0][j1] * fu;
    const double b = t[i1][j0] * (1 - fu) + t[i1][j1] * fu;
    return a * (1 - du) + b * du;
  };
  out.mu = bilerp(mu_);
  out.sigma = bilerp(sigma_);
  return out;
}

FrequencyChoice DensityModel::min_frequency_for_count(double d, double n,
                                                      double band_lo,
                                                      double band_hi) const {
  if (!(band_hi >= band_lo) || !(band_lo > 0.0))
    throw ConfigError("frequency band must be nonempty and positive");
  if (n <= 0.0) return {band_hi, true};
  if (expected_count(d, band_hi).mu >= n) return {band_hi, true};
  if (expected_count(d, band_lo).mu < n) return {band_lo, false};
  // mu is nonincreasing in f, so bisect for the largest feasible frequency.
  double lo = band_lo, hi = band_hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expected_count(d, mid).mu >= n)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, true};
}

bool DensityModel::monotone() const {
  for (std::size_t i = 0; i < mu_.size(); ++i)
    for (std::size_t j = 1; j < mu_[i].size(); ++j)
      if (mu_[i][j] > mu_[i][j - 1] + 1e-9) return false;
  for (std::size_t i = 1; i < mu_.size(); ++i)
    for (std::size_t j = 0; j < mu_[i].size(); ++j)
      if (mu_[i][j] > mu_[i - 1][j] + 1e-9) return false;
  return true;
}

std::string DensityModel::to_json() const {
  ordered_json j;
  j["version"] = 1;
  j["distances"] = distances_;
  j["frequencies"] = frequencies_;
  j["mu"] = mu_;
  j["sigma"] = sigma_;
  return j.dump(2) + "\n";
}

DensityModel DensityModel::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("density model JSON parse failure: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("density model: unsupported or missing 'version'");
  for (const char* key : {"distances", "frequencies", "mu", "sigma"})
    if (!j.contains(key))
      throw ConfigError(std::string("density model: missing key '") + key + "'");
  return DensityModel(j["distances"].get<std::vector<double>>(),
                      j["frequencies"].get<std::vector<double>>(),
                      j["mu"].get<std::vector<std::vector<double>>>(),
                      j["sigma"].get<std::vector<std::vector<double>>>());
}

void DensityModel::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write density model to " + path);
  f << to_json();
}

DensityModel DensityModel::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read density model from " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

DensityModel calibrate(const Scene& scene_template,
                       const ScanPatternConfig& pattern,
                       const std::vector<double>& distances,
                       const std::vector<double>& frequencies, int repetitions,
                       std::uint64_t seed, double sensor_height) {
  check_grid(distances, "distance");
  check_grid(frequencies, "frequency");
  if (repetitions < 10)
    throw ConfigError("calibration repetitions must be >= 10");
  pattern.validate();

  const SensorPose pose{Vec3(0.0, 0.0, sensor_height), 0.0};
  std::vector<std::vector<double>> mu(distances.size()),
      sigma(distances.size());

  for (std::size_t di = 0; di < distances.size(); ++di) {
    const double d = distances[di];
    Scene scene = scene_template;
    scene.noise.near_surface_clutter_rate = 0.0;
    scene.noise.seed = seed + di;
    const Vec3 mav_pos(d, 0.0, sensor_height);
    scene.mav.trajectory = TrajectoryScript{};
    scene.mav.trajectory.kind = TrajectoryScript::Kind::Line;
    scene.mav.trajectory.start = mav_pos;
    scene.mav.trajectory.end = mav_pos + Vec3(0, 0, 1e-6);
    scene.mav.trajectory.speed = 1e-9;
    scene.mav.trajectory.duration = 1e9;

    // Only rays whose scan angles fall inside the target's angular window can
    // contribute; prefilter before casting.
    const double attribution = 0.1;  // meters beyond the box surface
    const double slack = attribution + 4.0 * scene.noise.range_sigma;
    const double half_u =
        std::atan2(scene.mav.half_extents.y() + slack, d - scene.mav.half_extents.x());
    const double half_v =
        std::atan2(scene.mav.half_extents.z() + slack, d - scene.mav.half_extents.x());
    const Aabb mav_box{mav_pos, scene.mav.half_extents};

    for (std::size_t fi = 0; fi < frequencies.size(); ++fi) {
      const double f = frequencies[fi];
      const double period = 1.0 / f;
      std::vector<double> counts(static_cast<std::size_t>(repetitions), 0.0);
      // Stagger the window start per cell so cells sample distinct pattern
      // phases.
      const double t_base = static_cast<double>(di * frequencies.size() + fi) * 10.0;
      for (int r = 0; r < repetitions; ++r) {
        const double t0 = t_base + r * period;
        int count = 0;
        for_each_sample(pattern, t0, period,
                        [&](std::int64_t index, double t, double u, double v) {
          if (std::abs(u) > half_u || std::abs(v) > half_v) return;
          const RaySample s{direction_from_angles(u, v), t};
          const auto pt = cast_ray(scene, pose, s, mav_pos, index);
          if (pt && mav_box.distance(pose.to_world(pt->position)) <= attribution)
            ++count;
        });
        counts[static_cast<std::size_t>(r)] = count;
      }
      double mean = 0.0;
      for (double c : counts) mean += c;
      mean /= counts.size();
      double var = 0.0;
      for (double c : counts) var += (c - mean) * (c - mean);
      var /= std::max<std::size_t>(counts.size() - 1, 1);
      mu[di].push_back(mean);
      sigma[di].push_back(std::sqrt(var));
    }
  }
  isotonic_smooth(mu);
  DensityModel model(distances, frequencies, std::move(mu), std::move(sigma));
  if (!model.monotone())
    throw CalibrationError("calibrated density table failed monotone smoothing");
  return model;
}

double expected_spacing(double speed, double f) {
  if (!(f > 0.0)) throw ConfigError("spacing frequency must be positive");
  return speed / f;
}

}  // namespace mav
