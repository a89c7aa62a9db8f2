// Serial vs OpenMP benchmark runner on the empty-room query.

#include <benchmark/benchmark.h>

#include <numeric>

#include "pushplan/bench.hpp"

namespace {

const pushplan::LoadedScene& scene() {
  static const pushplan::LoadedScene s = pushplan::load_scene(PUSHPLAN_DATA_DIR "/empty_room.scene");
  return s;
}

pushplan::PlannerConfig config() {
  pushplan::PlannerConfig c = scene().scene.planner.to_config();
  c.t_max = 5.0;
  return c;
}

std::vector<std::uint64_t> seeds(int n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), std::uint64_t{1});
  return s;
}

void BM_Serial(benchmark::State& state) {
  const auto s = seeds(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = pushplan::run_benchmark_serial(scene().scene, scene().knowledge, config(), s, pushplan::all_modes());
    benchmark::DoNotOptimize(report);
  }
}

void BM_Parallel(benchmark::State& state) {
  const auto s = seeds(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto report = pushplan::run_benchmark(scene().scene, scene().knowledge, config(), s, pushplan::all_modes());
    benchmark::DoNotOptimize(report);
  }
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
