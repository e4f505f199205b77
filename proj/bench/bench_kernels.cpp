// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "lfs/planner.hpp"
#include "lfs/render.hpp"

using namespace lfs;

namespace {

std::vector<CuboidObstacle> scene() {
  // two walls ahead, roughly what the UAV sees mid-case
  CuboidObstacle a;
  a.center_x = 6;
  a.center_y = 1;
  a.length = 12;
  a.width = 2;
  a.height = 20;
  a.rotation = deg_to_rad(95);
  CuboidObstacle b = a;
  b.center_x = 12;
  b.center_y = -4;
  b.length = 21;
  b.rotation = deg_to_rad(5);
  return {a, b};
}

const Pose kPose = make_pose({0, 0, 2.5}, 0.1);

CameraIntrinsics camera(const benchmark::State& state) {
  return CameraIntrinsics::from_hfov(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4,
                                     deg_to_rad(86.0), 15.0);
}

void BM_RenderParallel(benchmark::State& state) {
  const auto s = scene();
  const CameraIntrinsics in = camera(state);
  for (auto _ : state) benchmark::DoNotOptimize(render_depth(s, kPose, in, {}));
  state.SetItemsProcessed(state.iterations() * in.width * in.height);
}

void BM_RenderReference(benchmark::State& state) {
  const auto s = scene();
  const CameraIntrinsics in = camera(state);
  for (auto _ : state) benchmark::DoNotOptimize(render_depth_reference(s, kPose, in, {}));
  state.SetItemsProcessed(state.iterations() * in.width * in.height);
}

PointCloud cloud(int stride) {
  const auto s = scene();
  return depth_to_cloud(render_depth_reference(s, kPose, default_intrinsics(), {}), kPose, {}, stride);
}

void BM_HistogramParallel(benchmark::State& state) {
  const PointCloud c = cloud(static_cast<int>(state.range(0)));
  const PlannerParams p;
  for (auto _ : state) benchmark::DoNotOptimize(build_histogram(c, kPose.position, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.points.size()));
}

void BM_HistogramReference(benchmark::State& state) {
  const PointCloud c = cloud(static_cast<int>(state.range(0)));
  const PlannerParams p;
  for (auto _ : state) benchmark::DoNotOptimize(build_histogram_reference(c, kPose.position, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.points.size()));
}

}  // namespace

BENCHMARK(BM_RenderParallel)->Arg(160)->Arg(640)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderReference)->Arg(160)->Arg(640)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HistogramParallel)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HistogramReference)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
