#include <benchmark/benchmark.h>

#include "ppme/coefficients.hpp"
#include "ppme/config.hpp"
#include "ppme/kernel_grid.hpp"
#include "ppme/master_equation.hpp"
#include "ppme/noise.hpp"
#include "ppme/pseudomode.hpp"
#include "ppme/qsd.hpp"

using namespace ppme;

namespace {

// Grid length is the benchmark argument, in units of 1/omega.
TimeGrid grid_for(const benchmark::State& state) { return TimeGrid(static_cast<double>(state.range(0)), 0.005); }

void BM_NoisePath(benchmark::State& state) {
  const auto bath = preset_config("fig1").bath();
  const auto grid = grid_for(state);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_noise_path(bath, grid, derive_seed(1, i++)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_NoisePath)->Arg(5)->Arg(25);

void BM_Trajectory(benchmark::State& state) {
  const auto cfg = preset_config("fig1");
  const auto grid = grid_for(state);
  const auto coeffs = coefficients_for_propagation(cfg.system(), cfg.bath(), grid);
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto noise = sample_noise_path(cfg.bath(), grid, derive_seed(1, i++));
    benchmark::DoNotOptimize(propagate_trajectory(cfg.system(), coeffs, noise, basis_state(2), grid));
  }
}
BENCHMARK(BM_Trajectory)->Arg(5)->Arg(25);

void BM_Coefficients(benchmark::State& state) {
  const auto cfg = preset_config("fig1");
  const auto grid = grid_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(coefficients_for_propagation(cfg.system(), cfg.bath(), grid));
}
BENCHMARK(BM_Coefficients)->Arg(25);

void BM_PpMasterEquation(benchmark::State& state) {
  const auto cfg = preset_config("fig3");
  const auto grid = grid_for(state);
  const auto coeffs = coefficients_for_propagation(cfg.system(), cfg.bath(), grid);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_pp_me(cfg.system(), coeffs, cfg.initial_density(), grid));
}
BENCHMARK(BM_PpMasterEquation)->Arg(25);

void BM_KernelGrid(benchmark::State& state) {
  const auto cfg = preset_config("fig3");
  const TimeGrid grid(static_cast<double>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_kernel_grid(cfg.system(), cfg.bath(), grid));
  state.SetComplexityN(static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_KernelGrid)->Arg(5)->Arg(10)->Complexity(benchmark::oNSquared);

void BM_PseudomodeReference(benchmark::State& state) {
  const auto cfg = preset_config("fig3");
  const auto grid = grid_for(state);
  const auto mode = PseudomodeConfig::from_bath(cfg.bath(), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_reference(cfg.system(), cfg.bath(), cfg.initial_density(), mode, grid));
}
BENCHMARK(BM_PseudomodeReference)->Args({25, 6})->Args({25, 8});

}  // namespace
BENCHMARK_MAIN();
