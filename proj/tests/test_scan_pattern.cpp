#include <set>

#include "doctest.h"
#include "mavtrack/errors.hpp"
#include "mavtrack/rng.hpp"
#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/trajectory.hpp"

using namespace mav;

namespace {
ScanPatternConfig small_cfg() {
  ScanPatternConfig cfg;
  cfg.point_rate = 240000;  // small rate keeps these tests fast
  return cfg;
}
}  // namespace

TEST_CASE("sample count is floor(rate*dt) and samples stay inside the FoV") {
  ScanPatternConfig cfg = small_cfg();
  const auto samples = sample_directions(cfg, 0.0, 0.01);
  CHECK(samples.size() == 2400);
  const double half_u = deg2rad(cfg.fov_h_deg) / 2 + 1e-12;
  const double half_v = deg2rad(cfg.fov_v_deg) / 2 + 1e-12;
  for (const RaySample& s : samples) {
    CHECK(std::abs(s.direction.norm() - 1.0) < 1e-9);
    CHECK(std::abs(azimuth_of(s.direction)) <= half_u);
    CHECK(std::abs(elevation_of(s.direction)) <= half_v);
  }
  for (std::size_t i = 1; i < samples.size(); ++i)
    CHECK(samples[i].t > samples[i - 1].t);
  CHECK(samples.front().t >= 0.0);
  CHECK(samples.back().t < 0.01);
}

TEST_CASE("first sample at t0=0 matches the parametric form") {
  ScanPatternConfig cfg = small_cfg();
  cfg.phase = 0.7;
  const auto samples = sample_directions(cfg, 0.0, 0.001);
  const double u = azimuth_of(samples[0].direction);
  const double v = elevation_of(samples[0].direction);
  CHECK(u == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v == doctest::Approx(0.5 * deg2rad(cfg.fov_v_deg) * std::sin(0.7))
                 .epsilon(1e-9));
}

TEST_CASE("repeated calls are byte-identical") {
  ScanPatternConfig cfg = small_cfg();
  const auto a = sample_directions(cfg, 1.234, 0.02);
  const auto b = sample_directions(cfg, 1.234, 0.02);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].direction == b[i].direction);
  }
}

TEST_CASE("windowed recurrence matches direct trig evaluation") {
  ScanPatternConfig cfg = small_cfg();
  for_each_sample(cfg, 3.21, 0.01, [&](std::int64_t, double t, double u, double v) {
    double ur, vr;
    scan_angles(cfg, t, ur, vr);
    CHECK(u == doctest::Approx(ur).epsilon(1e-9));
    CHECK(v == doctest::Approx(vr).epsilon(1e-9));
  });
}

TEST_CASE("coverage grows with integration time and saturates") {
  ScanPatternConfig cfg = small_cfg();
  const double c1 = coverage_fraction(cfg, 0.01, 1.0);
  const double c2 = coverage_fraction(cfg, 0.2, 1.0);
  const double c3 = coverage_fraction(cfg, 10.0, 1.0);
  CHECK(c1 <= c2);
  CHECK(c2 <= c3);
  CHECK(c2 >= c1);
  CHECK(c3 >= 0.99);
  // dt ladder monotonicity, brute force
  double prev = 0.0;
  for (double dt : {0.005, 0.01, 0.05, 0.1, 0.2, 0.5}) {
    const double c = coverage_fraction(cfg, dt, 1.0);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("single-sample limit covers exactly one cell") {
  ScanPatternConfig cfg = small_cfg();
  const double one_sample = 1.0 / cfg.point_rate;
  const int nu = static_cast<int>(std::ceil(cfg.fov_h_deg / 1.0));
  const int nv = static_cast<int>(std::ceil(cfg.fov_v_deg / 1.0));
  CHECK(coverage_fraction(cfg, one_sample, 1.0) ==
        doctest::Approx(1.0 / (nu * nv)));
}

TEST_CASE("non-repetition: disjoint equal windows visit different cell sets") {
  ScanPatternConfig cfg = small_cfg();
  auto cells = [&](double t0, double dt) {
    std::set<std::pair<int, int>> out;
    for_each_sample(cfg, t0, dt, [&](std::int64_t, double, double u, double v) {
      out.insert({static_cast<int>(std::floor(rad2deg(u))),
                  static_cast<int>(std::floor(rad2deg(v)))});
    });
    return out;
  };
  CHECK(cells(0.0, 0.1) != cells(0.1, 0.1));
  CHECK(cells(0.3, 0.15) != cells(1.0, 0.15));
}

TEST_CASE("directions stay inside the FoV for random configs") {
  SplitMix64 rng(42);
  for (int it = 0; it < 20; ++it) {
    ScanPatternConfig cfg;
    cfg.fov_h_deg = rng.uniform(10.0, 170.0);
    cfg.fov_v_deg = rng.uniform(5.0, 170.0);
    cfg.point_rate = 100000;
    cfg.petal_freq_a = rng.uniform(5.0, 80.0);
    cfg.petal_freq_b = cfg.petal_freq_a * kGoldenRatio;
    cfg.phase = rng.uniform(0.0, 2 * kPi);
    const double hu = deg2rad(cfg.fov_h_deg) / 2 + 1e-9;
    const double hv = deg2rad(cfg.fov_v_deg) / 2 + 1e-9;
    for_each_sample(cfg, rng.uniform(0.0, 5.0), 0.02,
                    [&](std::int64_t, double, double u, double v) {
      CHECK(std::abs(u) <= hu);
      CHECK(std::abs(v) <= hv);
    });
  }
}

TEST_CASE("invalid windows and configs are rejected") {
  ScanPatternConfig cfg = small_cfg();
  CHECK_THROWS_AS(sample_directions(cfg, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(sample_directions(cfg, 0.0, -1.0), ConfigError);
  ScanPatternConfig bad = cfg;
  bad.point_rate = 0;
  CHECK_THROWS_AS(sample_directions(bad, 0.0, 0.01), ConfigError);
  CHECK_THROWS_AS(coverage_fraction(cfg, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(coverage_fraction(cfg, 0.1, 30.0), ConfigError);
}

TEST_CASE("trajectory scripts give analytic velocities") {
  TrajectoryScript circle;
  circle.kind = TrajectoryScript::Kind::Circle;
  circle.center = Vec3(0, 0, 1.5);
  circle.radius = 2.0;
  circle.speed_start = 1.0;
  circle.speed_end = 1.0;
  circle.duration = 30.0;
  auto k = eval_trajectory(circle, 0.0);
  CHECK(k.p == Vec3(2, 0, 1.5));
  CHECK(k.v.norm() == doctest::Approx(1.0));

  TrajectoryScript line;
  line.kind = TrajectoryScript::Kind::Line;
  line.start = Vec3(0, 0, 1);
  line.end = Vec3(35, 0, 1);
  line.speed = 1.0;
  line.duration = 35.0;
  CHECK(eval_trajectory(line, 35.0).p == Vec3(35, 0, 1));
  CHECK(eval_trajectory(line, 10.0).p.x() == doctest::Approx(10.0));

  // finite-difference oracle
  TrajectoryScript ramp = circle;
  ramp.speed_end = 2.5;
  ramp.ramp_duration = 20.0;
  TrajectoryScript wp;
  wp.kind = TrajectoryScript::Kind::Waypoint;
  wp.knots = {{0, Vec3(0, 0, 1)}, {2, Vec3(1, 1, 1.5)}, {5, Vec3(3, 0, 1)},
              {8, Vec3(4, -1, 2)}};
  wp.duration = 8.0;
  SplitMix64 rng(7);
  for (const TrajectoryScript& s : {line, circle, ramp, wp}) {
    for (int i = 0; i < 50; ++i) {
      const double t = rng.uniform(0.01, std::min(s.duration, 8.0) - 0.01);
      const double h = 1e-6;
      const Vec3 fd =
          (eval_trajectory(s, t + h).p - eval_trajectory(s, t - h).p) / (2 * h);
      const Vec3 v = eval_trajectory(s, t).v;
      CHECK((fd - v).norm() <= 1e-6 * v.norm() + 1e-3 * h + 1e-6);
    }
  }
  CHECK_THROWS_AS(eval_trajectory(line, 40.0), std::out_of_range);
}
