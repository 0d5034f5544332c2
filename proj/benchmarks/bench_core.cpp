#include <benchmark/benchmark.h>

#include "pprx/engine.hpp"
#include "pprx/oracle.hpp"

using namespace pprx;

namespace {

sim::PreparedScenario four_agents() {
  sim::Scenario s;
  s.name = "bench";
  s.cfg = {100, 50, 20, 5, 10, LowCapVariant::PaperVerbatim};
  s.master_seed = 11;
  const belief::SymmetricBernoulli fair{0.5, 0.01, -0.01};
  s.agents = {{{1, 60, 0.75, 1, 1, 0}, belief::DeadlineDrift{0.02, 0.01}, sim::EquilibriumPolicy{}},
              {{2, 50, 0.65, 2, 2, 0}, fair, sim::EquilibriumPolicy{}},
              {{3, 15, 0.3, 3, 1, 0}, fair, sim::EquilibriumPolicy{}},
              {{4, 40, 0.55, 4, 3, 0}, belief::SymmetricBernoulli{0.5, 0.02, -0.01},
               sim::EquilibriumPolicy{}}};
  return sim::prepare(std::move(s));
}

void BM_RunFull(benchmark::State& state) {
  const auto p = four_agents();
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_full(p, r++));
}
BENCHMARK(BM_RunFull);

void BM_Ensemble(benchmark::State& state) {
  const auto p = four_agents();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::run_ensemble(p, static_cast<int>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BstarGrid(benchmark::State& state) {
  const ProjectConfig cfg{100, 400, 10, 3, 10, LowCapVariant::PaperVerbatim};
  for (auto _ : state) benchmark::DoNotOptimize(oracle::verify_bstar(cfg, 10, 2));
}
BENCHMARK(BM_BstarGrid)->Unit(benchmark::kMillisecond);

void BM_TimingOracle(benchmark::State& state) {
  const ProjectConfig cfg{100, 400, 20, 5, 10, LowCapVariant::PaperVerbatim};
  oracle::TimingOptions opt;
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::verify_timing(
        cfg, BeliefClass::High, belief::SymmetricBernoulli{0.5, 0.01, -0.02}, 0.72, 200, 10, opt));
  }
}
BENCHMARK(BM_TimingOracle)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
