// Serial reference vs OpenMP kernel for each data-parallel stage.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <numeric>
#include <vector>

#include "edgefed/runner.hpp"
#include "edgefed/scenario.hpp"

namespace sc = edgefed::scenario;

namespace {

void BM_GenerateWindows_Serial(benchmark::State& state) {
  const sc::GeneratorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sc::generate_clean_serial(cfg, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GenerateWindows_Omp(benchmark::State& state) {
  const sc::GeneratorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sc::generate_clean(cfg, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NormalEquations_Serial(benchmark::State& state) {
  const auto windows = sc::generate_clean(sc::GeneratorConfig{}, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(sc::accumulate_normal_equations_serial(windows, 6));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NormalEquations_Omp(benchmark::State& state) {
  const auto windows = sc::generate_clean(sc::GeneratorConfig{}, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(sc::accumulate_normal_equations(windows, 6));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<std::uint64_t> seeds(std::int64_t n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), std::uint64_t{1});
  return s;
}

edgefed::ExperimentConfig reference() {
  return edgefed::load_config(std::filesystem::path(EDGEFED_SOURCE_DIR) / "configs" / "reference.json");
}

void BM_Sweep_Serial(benchmark::State& state) {
  const auto cfg = reference();
  const auto s = seeds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(edgefed::run_sweep_serial(cfg, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Sweep_Omp(benchmark::State& state) {
  const auto cfg = reference();
  const auto s = seeds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(edgefed::run_sweep(cfg, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GenerateWindows_Serial)->Arg(660)->Arg(6600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateWindows_Omp)->Arg(660)->Arg(6600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalEquations_Serial)->Arg(660)->Arg(6600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalEquations_Omp)->Arg(660)->Arg(6600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep_Serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep_Omp)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
