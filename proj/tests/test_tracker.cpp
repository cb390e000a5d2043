#include "doctest.h"
#include "mavtrack/errors.hpp"
#include "mavtrack/kdtree.hpp"
#include "mavtrack/rng.hpp"
#include "mavtrack/tracker.hpp"

using namespace mav;

namespace {

DensityModel hand_model() {
  return DensityModel({2, 5, 10, 17}, {5, 10, 20, 50, 100},
                      {{400, 200, 100, 40, 20},
                       {120, 60, 30, 12, 6},
                       {48, 24, 12, 4.8, 2.4},
                       {20, 10, 5, 2, 1}},
                      {{20, 10, 5, 2, 1},
                       {11, 6, 3, 1.2, 0.6},
                       {5, 2.4, 1.2, 0.5, 0.3},
                       {2, 1, 0.5, 0.2, 0.1}});
}

Frame world_frame(const std::vector<Vec3>& world_pts, double t_start,
                  double integration) {
  Frame f;
  f.t_start = t_start;
  f.integration_time = integration;
  f.pose = SensorPose{};
  f.mid_pose = SensorPose{};
  for (const Vec3& p : world_pts) f.points.push_back({p, t_start});
  return f;
}

}  // namespace

TEST_CASE("ground removal keeps everything above the cut") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(Vec3(i * 0.1, 0, 0.01));  // ground
  for (int i = 0; i < 10; ++i) pts.push_back(Vec3(2, 0, 1.5));         // target
  Frame f = world_frame(pts, 0.0, 0.1);
  const Frame out = ground_removal(f, 0.0, 0.3, 1.5);
  CHECK(out.points.size() == 10);
  for (const LidarPoint& p : out.points) CHECK(p.position.z() >= 0.3);

  // pure ground frame -> empty
  Frame g = world_frame(std::vector<Vec3>(30, Vec3(1, 1, 0.05)), 0, 0.1);
  CHECK(ground_removal(g, 0.0, 0.3, 1.5).points.empty());

  // brute-force predicate oracle on random points
  SplitMix64 rng(3);
  std::vector<Vec3> mix;
  for (int i = 0; i < 500; ++i)
    mix.push_back(Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 3)));
  Frame fm = world_frame(mix, 0, 0.1);
  const double alt = 1.2, gz = 0.1, margin = 0.25;
  const Frame got = ground_removal(fm, gz, margin, alt);
  std::size_t expect = 0;
  const double cut = std::min(gz + margin, alt - margin);
  for (const Vec3& p : mix)
    if (p.z() >= cut) ++expect;
  CHECK(got.points.size() == expect);
}

TEST_CASE("kd-tree radius queries match brute force") {
  SplitMix64 rng(17);
  for (int round = 0; round < 12; ++round) {
    std::vector<Vec3> pts;
    const int n = 50 + static_cast<int>(rng.uniform() * 1500);
    for (int i = 0; i < n; ++i)
      pts.push_back(Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10),
                         rng.uniform(-2, 4)));
    KdTree tree(pts);
    for (int q = 0; q < 100; ++q) {
      const Vec3 c(rng.uniform(-11, 11), rng.uniform(-11, 11), rng.uniform(-3, 5));
      const double r = rng.uniform(0.0, 6.0);
      auto got = tree.radius_query(c, r);
      std::sort(got.begin(), got.end());
      std::vector<std::size_t> want;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if ((pts[i] - c).norm() <= r) want.push_back(i);
      CHECK(got == want);
    }
  }
  // empty tree, zero radius
  KdTree empty{std::vector<Vec3>{}};
  CHECK(empty.radius_query(Vec3::Zero(), 5.0).empty());
  KdTree one(std::vector<Vec3>{Vec3(1, 2, 3), Vec3(1, 2, 3), Vec3(4, 5, 6)});
  CHECK(one.radius_query(Vec3(1, 2, 3), 0.0).size() == 2);
}

TEST_CASE("prediction follows the constant-velocity formula") {
  CHECK(predict(Vec3(0, 0, 1), Vec3(0, 0, 0), 10) == Vec3(0, 0, 1));
  CHECK((predict(Vec3(0, 0, 1), Vec3(1, 0, 0), 10) - Vec3(0.1, 0, 1)).norm() <
        1e-15);
  CHECK((predict(Vec3(2, -1, 1.5), Vec3(0, 2, 0), 5) - Vec3(2, -0.6, 1.5))
            .norm() < 1e-15);
  CHECK_THROWS_AS(predict(Vec3::Zero(), Vec3::Zero(), 0.0), ConfigError);
}

TEST_CASE("centroid is the arithmetic mean") {
  CHECK(centroid({Vec3(1, 0, 0), Vec3(-1, 0, 0)}) == Vec3(0, 0, 0));
  CHECK(centroid({Vec3(3, 4, 5)}) == Vec3(3, 4, 5));
  SplitMix64 rng(5);
  std::vector<Vec3> pts;
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < 500; ++i) {
    pts.push_back(Vec3(rng.uniform(), rng.uniform(), rng.uniform()));
    sum += pts.back();
  }
  CHECK((centroid(pts) - sum / 500.0).norm() < 1e-12);
  CHECK_THROWS(centroid({}));
}

TEST_CASE("fusion weights by point count and passes singletons through") {
  MavState mf;
  mf.p = Vec3(0, 0, 1);
  mf.n_points = 20;
  mf.t = 1.0;
  mf.source = EstimateSource::MF;
  MavState hf;
  hf.p = Vec3(0.12, 0, 1);
  hf.n_points = 4;
  hf.t = 1.01;
  hf.source = EstimateSource::HF;
  const MavState f = fuse(mf, hf);
  CHECK(f.p.x() == doctest::Approx(0.02));
  CHECK(f.t == doctest::Approx(1.01));
  CHECK(f.source == EstimateSource::Fused);
  // convex combination: fused position lies between the inputs
  CHECK(f.p.x() >= 0.0);
  CHECK(f.p.x() <= 0.12);

  CHECK(fuse(std::nullopt, hf).p == hf.p);
  CHECK(fuse(mf, std::nullopt).p == mf.p);
  CHECK_THROWS(fuse(std::nullopt, std::nullopt));
}

TEST_CASE("rate adaptation follows density and blur bounds") {
  const DensityModel m = hand_model();
  TrackerConfig cfg;
  cfg.mav_diameter = 0.26;
  const SensorPose sensor{Vec3(0, 0, 0.8), 0.0};
  CountThresholds thr;

  MavState near_slow;
  near_slow.p = Vec3(2, 0, 0.8);
  near_slow.v = Vec3::Zero();
  RateSet r = adjust_rates(near_slow, sensor, m, thr, cfg);
  CHECK(r.f_HF == doctest::Approx(100.0));  // density ceiling not binding
  CHECK(r.f_MF == doctest::Approx(20.0));

  // |v| = 0: blur bound inactive, rates set purely by density
  MavState far_slow;
  far_slow.p = Vec3(17, 0, 0.8);
  far_slow.v = Vec3::Zero();
  const RateSet rf = adjust_rates(far_slow, sensor, m, thr, cfg);
  CHECK(rf.f_MF <= r.f_MF + 1e-9);  // monotone adaptation with distance
  CHECK(rf.f_HF >= 20.0);
  CHECK(rf.f_HF <= 100.0);

  // fast target forces the blur floor up
  MavState fast = far_slow;
  fast.v = Vec3(9, 0, 0);
  const RateSet rb = adjust_rates(fast, sensor, m, thr, cfg);
  CHECK(rb.f_HF >= 9.0 / (cfg.c_blur * cfg.mav_diameter) - 1e-9);
  CHECK(rb.f_HF <= 100.0);

  // band invariants
  for (const RateSet* rs : std::initializer_list<const RateSet*>{&r, &rf, &rb}) {
    CHECK(rs->f_HF >= 20.0);
    CHECK(rs->f_HF <= 100.0);
    CHECK(rs->f_MF >= 5.0);
    CHECK(rs->f_MF <= 20.0);
    CHECK(rs->f_HF > rs->f_MF);
    CHECK(rs->f_MF > rs->f_LF);
  }
}

TEST_CASE("FoV-keeping command is proportional and saturated") {
  TrackerConfig cfg;
  ScanPatternConfig fov;
  UgvState ugv;

  MavState center;
  center.p = Vec3(5, 0, 0.8);
  const UgvCommand c0 = ugv_control(center, ugv, fov, 5.0, cfg, 0.8);
  CHECK(c0.yaw_rate == doctest::Approx(0.0));
  CHECK(c0.forward == doctest::Approx(0.0));

  MavState left;
  left.p = Vec3(5 * std::cos(deg2rad(20)), 5 * std::sin(deg2rad(20)), 0.8);
  const UgvCommand c1 = ugv_control(left, ugv, fov, 5.0, cfg, 0.8);
  CHECK(c1.yaw_rate ==
        doctest::Approx(std::min(cfg.k_yaw * deg2rad(20), cfg.yaw_rate_max)));

  MavState wayleft;
  wayleft.p = Vec3(0, 5, 0.8);
  CHECK(ugv_control(wayleft, ugv, fov, 5.0, cfg, 0.8).yaw_rate ==
        doctest::Approx(cfg.yaw_rate_max));

  // target close and high: elevation near the FoV edge -> back away
  MavState high;
  high.p = Vec3(2.0, 0, 0.8 + 2.0 * std::tan(deg2rad(11.0)));
  const UgvCommand c2 = ugv_control(high, ugv, fov, 5.0, cfg, 0.8);
  CHECK(c2.forward < 0.0);
  CHECK(c2.forward >= -cfg.forward_max);
}

TEST_CASE("tracker follows a constant-velocity target and reports loss") {
  const DensityModel m = hand_model();
  TrackerConfig cfg;
  cfg.ground_z = 0.0;
  ScanPatternConfig fov;
  RateSet rates;
  rates.f_HF = 100;
  rates.f_MF = 10;

  Tracker tracker(cfg, &m, fov, 0.8, false, rates);
  MavState s0;
  s0.p = Vec3(5, 0, 1.2);
  s0.v = Vec3(0.5, 0, 0);
  tracker.init(s0);
  UgvState ugv;

  SplitMix64 rng(9);
  const double f = 10.0;
  double t = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Vec3 truth = s0.p + s0.v * (t + 0.05);  // window midpoint
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i)
      pts.push_back(truth + Vec3(rng.uniform(-0.09, 0.09),
                                 rng.uniform(-0.09, 0.09),
                                 rng.uniform(-0.025, 0.025)));
    Frame frame = world_frame(pts, t, 1.0 / f);
    frame.modality = Modality::MF;
    tracker.process_frame(frame, ugv);
    t += 1.0 / f;
  }
  REQUIRE(!tracker.record().fused.empty());
  CHECK(!tracker.lost());
  const MavState last = tracker.record().fused.back();
  CHECK((last.p - (s0.p + s0.v * (t - 0.05))).norm() < 0.15);
  CHECK((last.v - s0.v).norm() < 0.3);

  // target disappears: loss declared within the timeout plus one period
  for (int k = 0; k < 15 && !tracker.lost(); ++k) {
    Frame empty = world_frame({}, t, 1.0 / f);
    empty.modality = Modality::MF;
    tracker.process_frame(empty, ugv);
    t += 1.0 / f;
  }
  CHECK(tracker.lost());
  CHECK(tracker.record().lost_t <= 3.0 + cfg.lost_timeout + 2.0 / f + 1e-9);

  // deterministic reprocessing: same frames, same record
  Tracker t2(cfg, &m, fov, 0.8, false, rates);
  t2.init(s0);
  SplitMix64 rng2(9);
  double tt = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Vec3 truth = s0.p + s0.v * (tt + 0.05);
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i)
      pts.push_back(truth + Vec3(rng2.uniform(-0.09, 0.09),
                                 rng2.uniform(-0.09, 0.09),
                                 rng2.uniform(-0.025, 0.025)));
    Frame frame = world_frame(pts, tt, 1.0 / f);
    frame.modality = Modality::MF;
    t2.process_frame(frame, ugv);
    tt += 1.0 / f;
  }
  REQUIRE(t2.record().fused.size() == 30);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(t2.record().fused[i].p ==
          tracker.record().fused[i].p);
}

TEST_CASE("wide clusters are rejected as structure ingestion") {
  const DensityModel m = hand_model();
  TrackerConfig cfg;
  ScanPatternConfig fov;
  RateSet rates;
  Tracker tracker(cfg, &m, fov, 0.8, false, rates);
  MavState s0;
  s0.p = Vec3(5, 0, 1.2);
  s0.v = Vec3::Zero();
  tracker.init(s0);
  UgvState ugv;

  std::vector<Vec3> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(Vec3(5, 0, 1.2));
  for (int i = 0; i < 40; ++i)
    pts.push_back(Vec3(5.45, (i % 5 - 2) * 0.1, 1.2));
  Frame frame = world_frame(pts, 0.0, 0.1);
  frame.modality = Modality::MF;
  tracker.process_frame(frame, ugv);
  CHECK(tracker.record().fused.empty());  // rejected, no estimate
  REQUIRE(!tracker.record().diagnostics.empty());
  CHECK(!tracker.record().diagnostics.back().accepted);
}

TEST_CASE("clutter just outside the search radius is excluded") {
  const DensityModel m = hand_model();
  TrackerConfig cfg;
  ScanPatternConfig fov;
  Tracker tracker(cfg, &m, fov, 0.8, false, RateSet{});
  MavState s0;
  s0.p = Vec3(5, 0, 1.2);
  s0.v = Vec3::Zero();
  tracker.init(s0);
  UgvState ugv;
  std::vector<Vec3> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(Vec3(5, 0, 1.2));
  const double radius = cfg.search_radius_base;  // v = 0
  for (int i = 0; i < 60; ++i)
    pts.push_back(Vec3(5 + radius + 0.01, 0, 1.2 + 0.2 * (i % 3)));
  Frame frame = world_frame(pts, 0.0, 0.1);
  frame.modality = Modality::MF;
  tracker.process_frame(frame, ugv);
  REQUIRE(tracker.record().fused.size() == 1);
  CHECK(tracker.record().fused[0].n_points == 25);
  CHECK((tracker.record().fused[0].p - Vec3(5, 0, 1.2)).norm() < 1e-9);
}
