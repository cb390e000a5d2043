#include <benchmark/benchmark.h>

#include "mavtrack/kdtree.hpp"
#include "mavtrack/rng.hpp"
#include "mavtrack/scan_pattern.hpp"
#include "mavtrack/simulator.hpp"

using namespace mav;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.emplace_back(rng.uniform(-10, 10), rng.uniform(-10, 10),
                     rng.uniform(0, 3));
  return pts;
}

Scene bench_scene() {
  Scene s;
  s.has_ground = true;
  s.obstacles.push_back({Aabb{Vec3(10.1, 0, 1.5), Vec3(0.5, 6, 1.5)}, 0.6});
  s.mav.trajectory.kind = TrajectoryScript::Kind::Line;
  s.mav.trajectory.start = Vec3(6, 0, 1.2);
  s.mav.trajectory.end = Vec3(6, 1, 1.2);
  s.mav.trajectory.speed = 0.5;
  s.mav.trajectory.duration = 1e9;
  return s;
}

}  // namespace

void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    KdTree tree(pts);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(BM_KdTreeBuild)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_KdTreeRadiusQuery(benchmark::State& state) {
  const KdTree tree(random_points(static_cast<std::size_t>(state.range(0)), 2));
  SplitMix64 rng(3);
  for (auto _ : state) {
    const Vec3 c(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(0, 3));
    benchmark::DoNotOptimize(tree.radius_query(c, 1.0));
  }
}
BENCHMARK(BM_KdTreeRadiusQuery)->Arg(10000)->Arg(100000);

void BM_ScanSampling(benchmark::State& state) {
  ScanPatternConfig cfg;
  double sink = 0.0;
  for (auto _ : state) {
    for_each_sample(cfg, 0.0, 0.01,
                    [&](std::int64_t, double, double u, double v) {
                      sink += u + v;
                    });
  }
  benchmark::DoNotOptimize(sink);
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cfg.point_rate * 0.01));
}
BENCHMARK(BM_ScanSampling);

void BM_SimulateChunk(benchmark::State& state) {
  const Scene scene = bench_scene();
  const Simulator sim(scene, ScanPatternConfig{});
  const SensorPose pose{Vec3(0, 0, 0.8), 0.0};
  std::vector<LidarPoint> out;
  for (auto _ : state) {
    out.clear();
    sim.generate_chunk(0.0, 0.005, pose, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(
      state.iterations() *
      static_cast<std::int64_t>(ScanPatternConfig{}.point_rate * 0.005));
}
BENCHMARK(BM_SimulateChunk);

BENCHMARK_MAIN();
