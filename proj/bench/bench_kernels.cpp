// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "hypocone/closure.hpp"
#include "hypocone/equilibria.hpp"
#include "hypocone/montecarlo.hpp"

using namespace hypocone;

namespace {

SimConfig sim_config(std::int64_t paths) {
  SimConfig c;
  c.t = 1.0;
  c.dt = 1.0 / 1000;
  c.n_paths = static_cast<std::uint64_t>(paths);
  c.seed = 1;
  c.z = Eigen::Vector2d(1, 0);
  return c;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto m = make_builtin("langevin", {{"d", "1"}});
  const auto c = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(m, Eigen::Vector2d::Zero(), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto m = make_builtin("langevin", {{"d", "1"}});
  const auto c = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(m, Eigen::Vector2d::Zero(), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void equilibria(benchmark::State& state, bool parallel) {
  const auto m = make_builtin("bhw", {{"a1", "1"}});
  const Box box{Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2)};
  EquilibriumSearchOptions opt;
  opt.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(find_equilibria(m, box, static_cast<int>(state.range(0)), 1, opt));
}

void BM_EquilibriaSerial(benchmark::State& state) { equilibria(state, false); }
void BM_EquilibriaParallel(benchmark::State& state) { equilibria(state, true); }

void closure(benchmark::State& state, bool parallel) {
  const auto m = make_builtin("burgers", {});
  const auto init = closure_init(m);
  ClosureOptions opt;
  opt.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(closure_step(m, init, opt));
}

void BM_ClosureStepSerial(benchmark::State& state) { closure(state, false); }
void BM_ClosureStepParallel(benchmark::State& state) { closure(state, true); }

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EquilibriaSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EquilibriaParallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClosureStepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClosureStepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
