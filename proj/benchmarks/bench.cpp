// Microbenchmarks for the hot construction paths. These guard against
// accidental complexity regressions; correctness lives in tests/.

#include <benchmark/benchmark.h>

#include "covcat/confcat.hpp"
#include "covcat/epicat.hpp"
#include "covcat/finset.hpp"
#include "covcat/graphcov.hpp"
#include "covcat/scomb.hpp"

namespace {

void BM_EnumerateSelfic(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    long long total = 0;
    for (int l = 0; l <= k; ++l)
      total += static_cast<long long>(covcat::enumerate_selfic(k, l).size());
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_EnumerateSelfic)->Arg(6)->Arg(8)->Arg(10);

void BM_EpifinAxiomSweep(benchmark::State& state) {
  const int card = static_cast<int>(state.range(0));
  for (auto _ : state) {
    covcat::AxiomSweepReport r = covcat::epifin_axiom_sweep(card);
    benchmark::DoNotOptimize(r.violations);
  }
}
BENCHMARK(BM_EpifinAxiomSweep)->Arg(2)->Arg(3);

void BM_LiftPath(benchmark::State& state) {
  covcat::CoveringSpace pi = covcat::cyclic_cover(12, 3);
  covcat::EdgePath base;
  base.start = 0;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
    base.steps.push_back(static_cast<uint32_t>(2 * (i % 3)));
  for (auto _ : state) {
    covcat::EdgePath up = covcat::lift_path(pi, base, 0);
    benchmark::DoNotOptimize(up.steps.size());
  }
}
BENCHMARK(BM_LiftPath)->Arg(3)->Arg(30)->Arg(300);

void BM_BuildConfNerve(benchmark::State& state) {
  covcat::Graph c3 = covcat::cycle_graph(3);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    covcat::BuiltConf C =
        covcat::build_conf(c3, covcat::kStrictFlavor, 2, 2, depth);
    benchmark::DoNotOptimize(C.nrv.sset.size(depth));
  }
}
BENCHMARK(BM_BuildConfNerve)->Arg(1)->Arg(2);

void BM_StrataCensus(benchmark::State& state) {
  covcat::CoveringSpace pi = covcat::cyclic_cover(12, 3);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    covcat::StratumCensus census = covcat::strata_census(pi, k);
    benchmark::DoNotOptimize(census.total);
  }
}
BENCHMARK(BM_StrataCensus)->Arg(2)->Arg(3)->Arg(4);

void BM_DeckTransformations(benchmark::State& state) {
  covcat::CoveringSpace pi =
      covcat::cyclic_cover(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    auto decks = covcat::deck_transformations(pi);
    benchmark::DoNotOptimize(decks.size());
  }
}
BENCHMARK(BM_DeckTransformations)->Arg(6)->Arg(12)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
