#include <benchmark/benchmark.h>

#include "scalesim/experiment.hpp"
#include "scalesim/simulate.hpp"
#include "scalesim/verify.hpp"

using namespace scalesim;

namespace {

const ChainModel& cantor_chain() {
  static const ChainModel chain = [] {
    DiffusionSpec spec = bundled_spec("cantor");
    PathTestConfig p;
    return build_chain(spec, path_test_grid(spec, p));
  }();
  return chain;
}

void horizon_paths(benchmark::State& state, bool parallel) {
  SimConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.seed = 1;
  cfg.parallel = parallel;
  for (auto _ : state) {
    BatchResult r = simulate_chain(cantor_chain(), 0.0, cfg);
    benchmark::DoNotOptimize(r.summaries.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void exit_events(benchmark::State& state, bool parallel) {
  DiffusionSpec spec = bundled_spec("cantor");
  Window w{-0.125, 0.0, 1.0 / 56 + 0.125};
  ChainModel c = build_chain(spec, make_grid(spec, w.a, w.b, (w.b - w.a) / 8, {w.x}));
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto h = simulate_exits(c, w.a, w.x, w.b, n, 1, 0, parallel);
    benchmark::DoNotOptimize(h.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_chain_serial(benchmark::State& s) { horizon_paths(s, false); }
void BM_chain_openmp(benchmark::State& s) { horizon_paths(s, true); }
void BM_exits_serial(benchmark::State& s) { exit_events(s, false); }
void BM_exits_openmp(benchmark::State& s) { exit_events(s, true); }

}  // namespace

BENCHMARK(BM_chain_serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_chain_openmp)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exits_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exits_openmp)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
