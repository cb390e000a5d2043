#include "doctest.h"
#include "mavtrack/rng.hpp"
#include "mavtrack/simulator.hpp"

using namespace mav;

namespace {

TrajectoryScript hover_at(const Vec3& p) {
  TrajectoryScript t;
  t.kind = TrajectoryScript::Kind::Line;
  t.start = p;
  t.end = p + Vec3(0, 0, 1e-6);
  t.speed = 1e-9;
  t.duration = 1e9;
  return t;
}

Scene base_scene() {
  Scene s;
  s.has_ground = false;
  s.mav.trajectory = hover_at(Vec3(5, 0, 0.8));
  s.noise.range_sigma = 0.0;
  s.noise.dropout_enabled = false;
  return s;
}

ScanPatternConfig small_pattern() {
  ScanPatternConfig cfg;
  cfg.point_rate = 240000;
  return cfg;
}

}  // namespace

TEST_CASE("ray at a wall returns the exact range without noise") {
  Scene s = base_scene();
  s.mav.trajectory = hover_at(Vec3(500, 500, 500));  // out of the way
  Obstacle wall;
  wall.box = Aabb{Vec3(10.5, 0, 0), Vec3(0.5, 20, 20)};
  s.obstacles.push_back(wall);
  const SensorPose pose;
  const RaySample ray{Vec3(1, 0, 0), 0.0};
  const auto pt = cast_ray(s, pose, ray, Vec3(500, 500, 500), 0);
  REQUIRE(pt.has_value());
  CHECK(pt->position.norm() == doctest::Approx(10.0).epsilon(1e-12));

  // miss: ray pointing away from all geometry
  const RaySample away{Vec3(-1, 0, 0), 0.0};
  CHECK(!cast_ray(s, pose, away, Vec3(500, 500, 500), 1).has_value());
}

TEST_CASE("range noise has the configured spread") {
  Scene s = base_scene();
  s.mav.trajectory = hover_at(Vec3(500, 500, 500));
  Obstacle wall;
  wall.box = Aabb{Vec3(10.5, 0, 0), Vec3(0.5, 20, 20)};
  s.obstacles.push_back(wall);
  s.noise.range_sigma = 0.02;
  const SensorPose pose;
  const RaySample ray{Vec3(1, 0, 0), 0.0};
  double sum = 0.0, sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto pt = cast_ray(s, pose, ray, Vec3(500, 500, 500), i);
    REQUIRE(pt.has_value());
    const double r = pt->position.norm();
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n;
  const double std = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(std >= 0.018);
  CHECK(std <= 0.022);
}

TEST_CASE("empty scene produces an empty stream") {
  Scene s = base_scene();
  s.mav.trajectory = hover_at(Vec3(-500, 0, 0));  // behind the sensor
  const auto stream = simulate_stream(s, small_pattern(), SensorPose{}, 0.05);
  CHECK(stream.empty());
}

TEST_CASE("stream timestamps are nondecreasing and runs are deterministic") {
  Scene s = base_scene();
  s.has_ground = true;
  s.noise.range_sigma = 0.02;
  s.noise.dropout_enabled = true;
  s.noise.seed = 99;
  const SensorPose pose{Vec3(0, 0, 0.8), 0.1};
  const auto a = simulate_stream(s, small_pattern(), pose, 0.1);
  const auto b = simulate_stream(s, small_pattern(), pose, 0.1);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].position == b[i].position);
    if (i > 0) CHECK(a[i].t >= a[i - 1].t);
  }
}

TEST_CASE("noise-free ranges equal exact geometric distances") {
  Scene s = base_scene();
  s.has_ground = true;
  Obstacle wall;
  wall.box = Aabb{Vec3(12, 0, 1), Vec3(0.4, 8, 1)};
  s.obstacles.push_back(wall);
  const Vec3 mav_pos(5, 0, 0.8);
  const SensorPose pose{Vec3(0, 0, 0.8), 0.0};
  const Aabb mav_box{mav_pos, s.mav.half_extents};
  const auto stream = simulate_stream(s, small_pattern(), pose, 0.02);
  REQUIRE(!stream.empty());
  for (const LidarPoint& p : stream) {
    const Vec3 w = pose.to_world(p.position);
    const double d_ground = std::abs(w.z() - s.ground_z);
    const double d_wall = wall.box.distance(w);
    const double d_mav = mav_box.distance(w);
    CHECK(std::min({d_ground, d_wall, d_mav}) <= 1e-9);
  }
}

TEST_CASE("clutter appears between the target and a close wall") {
  Scene s = base_scene();
  Obstacle wall;
  wall.box = Aabb{Vec3(5.5, 0, 0.8), Vec3(0.25, 4, 2)};
  s.obstacles.push_back(wall);
  s.mav.trajectory = hover_at(Vec3(5.0, 0, 0.8));  // gap ~0.16 m to the wall
  s.noise.near_surface_clutter_rate = 20000.0;
  s.noise.clutter_trigger_distance = 0.3;
  s.noise.seed = 5;
  const SensorPose pose{Vec3(0, 0, 0.8), 0.0};
  const auto stream = simulate_stream(s, small_pattern(), pose, 0.05);
  int n_between = 0;
  for (const LidarPoint& p : stream) {
    const Vec3 w = pose.to_world(p.position);
    if (w.x() > 5.1 && w.x() < 5.24 && std::abs(w.y()) < 0.2 &&
        std::abs(w.z() - 0.8) < 0.2)
      ++n_between;
  }
  CHECK(n_between > 100);

  // far target: no clutter
  Scene far = s;
  far.mav.trajectory = hover_at(Vec3(3.0, 0, 0.8));
  const auto clean = simulate_stream(far, small_pattern(), pose, 0.05);
  for (const LidarPoint& p : clean) {
    const Vec3 w = pose.to_world(p.position);
    const bool on_wall = wall.box.distance(w) < 1e-6;
    const bool on_mav = Aabb{Vec3(3.0, 0, 0.8), far.mav.half_extents}.distance(w) < 1e-6;
    CHECK((on_wall || on_mav));
  }
}

TEST_CASE("dropout thins far dark targets more than near bright ones") {
  Scene s = base_scene();
  s.noise.dropout_enabled = true;
  auto count_hits = [&](double dist, double refl) {
    Scene sc = s;
    sc.mav.trajectory = hover_at(Vec3(500, 500, 500));
    Obstacle wall;
    wall.box = Aabb{Vec3(dist, 0, 0), Vec3(0.1, 10, 10)};
    wall.reflectivity = refl;
    sc.obstacles.push_back(wall);
    int n = 0;
    const RaySample ray{Vec3(1, 0, 0), 0.0};
    for (int i = 0; i < 4000; ++i)
      if (cast_ray(sc, SensorPose{}, ray, Vec3(500, 500, 500), i)) ++n;
    return n;
  };
  CHECK(count_hits(2.0, 0.9) > count_hits(25.0, 0.2));
}

TEST_CASE("scene validation rejects malformed inputs") {
  Scene s = base_scene();
  s.mav.half_extents = Vec3(0.01, 0.01, 0.01);  // 8 cm^3, outside sanity band
  CHECK_THROWS(s.validate());
  Scene s2 = base_scene();
  s2.noise.range_sigma = -1.0;
  CHECK_THROWS(s2.validate());
}
