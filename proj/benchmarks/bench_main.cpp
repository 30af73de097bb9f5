#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nlfp/measure.hpp"
#include "nlfp/outerloop.hpp"

using namespace nlfp;

namespace {

std::vector<double> random_values(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

void BM_SuperlevelMeasures(benchmark::State& state) {
  const auto v = random_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(superlevel_measures(v, 1e-4));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SuperlevelMeasures)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

void BM_SmoothedAverage(benchmark::State& state) {
  const auto v = random_values(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_superlevel_average(v, 1e-4, 0.01));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SmoothedAverage)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

// One Dirichlet solve on the unit disk, factorization reused across iterations.
void BM_DiskSolve(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Grid g = build_ball({}, 1.0, h, 2);
  const Discretization disc(g, BoundaryData{});
  const auto op = state.range(1) == 0 ? EllipticOperator::laplacian()
                                      : EllipticOperator::pucci_minus(1, 2);
  DirichletSolver solver(disc, op);
  const std::vector<double> f(g.interior_count(), -1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
  state.counters["nodes"] = static_cast<double>(g.interior_count());
}
BENCHMARK(BM_DiskSolve)->ArgsProduct({{16, 32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_NonlocalDisk(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Grid g = build_ball({}, 1.0, h, 2);
  const Discretization disc(g, BoundaryData{});
  const auto prof = ProfileFunction::linear(-1.0, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_nonlocal(EllipticOperator::laplacian(), disc, prof));
  }
}
BENCHMARK(BM_NonlocalDisk)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
