#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "curveguide/curvenet.hpp"
#include "curveguide/feedsim.hpp"
#include "curveguide/geometry.hpp"
#include "curveguide/pipeline.hpp"
#include "curveguide/toolpath.hpp"

using namespace curveguide;

namespace {

std::vector<geom::Point3> wavy_points(int n) {
  std::vector<geom::Point3> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    double x = 30.0 * i / (n - 1);
    pts.push_back({x, 5.0 + std::sin(0.4 * x), 0.2 * std::cos(0.3 * x)});
  }
  return pts;
}

}  // namespace

static void FitSpline(benchmark::State& state) {
  auto pts = wavy_points(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto curve = geom::fit_spline(pts, 5);
    benchmark::DoNotOptimize(curve);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(FitSpline)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void StationPoints(benchmark::State& state) {
  auto curve = geom::fit_spline(wavy_points(61), 5);
  std::vector<geom::DiscretizationPlane> planes;
  int n = static_cast<int>(state.range(0));
  for (int i = 0; i <= n; ++i)
    planes.push_back({30.0 * i / n, {1.0, 0.0}});
  for (auto _ : state) {
    auto pts = geom::curve_station_points(curve, planes);
    benchmark::DoNotOptimize(pts);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(StationPoints)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void IntermediateCurve(benchmark::State& state) {
  auto feature = pipeline::make_fixture("master-like");
  net::StepP step(30.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto curve = net::intermediate_curve(feature.boundary1, feature.boundary2,
                                         net::RatioK(0.75), step, feature);
    benchmark::DoNotOptimize(curve);
  }
}
BENCHMARK(IntermediateCurve)->Arg(30)->Arg(120)->Arg(480);

static void GuidanceToolpath(benchmark::State& state) {
  auto feature = pipeline::make_fixture("master-like");
  net::MachiningArea area{feature.boundary1, feature.boundary2, "B1", "B2"};
  for (auto _ : state) {
    auto prog = path::guidance_toolpath(feature, area, path::Tool{},
                                        path::StrategyParams{});
    benchmark::DoNotOptimize(prog);
  }
}
BENCHMARK(GuidanceToolpath)->Unit(benchmark::kMillisecond);

static void PlanProgram(benchmark::State& state) {
  auto feature = pipeline::make_fixture("master-like");
  net::MachiningArea area{feature.boundary1, feature.boundary2, "B1", "B2"};
  auto prog = path::guidance_toolpath(feature, area, path::Tool{},
                                      path::StrategyParams{});
  for (auto _ : state) {
    auto res = sim::plan_program(prog, sim::MachineKinematics{}, 100.0);
    benchmark::DoNotOptimize(res);
  }
  state.counters["blocks/s"] = benchmark::Counter(
      static_cast<double>(prog.blocks.size()) * state.iterations(),
      benchmark::Counter::kIsRate);
}
BENCHMARK(PlanProgram)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
