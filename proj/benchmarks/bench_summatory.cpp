#include <benchmark/benchmark.h>

#include "moddiv/multiplicative.hpp"
#include "moddiv/summatory.hpp"

namespace {

using namespace moddiv;

void BM_BulkEvaluate(benchmark::State& state, const char* id) {
  const auto& f = function_by_id(id);
  const auto x = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(summatory(f, {x}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_BulkEvaluate, E_sigma, "E_sigma")->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BulkEvaluate, tau_inf, "tau_inf")->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BulkEvaluate, frak_f_e, "frak_f_e")->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Threads(benchmark::State& state) {
  WorkerPool pool(static_cast<unsigned>(state.range(0)));
  BulkOptions o;
  o.pool = &pool;
  const auto& f = function_by_id("sigma_e_inf");
  for (auto _ : state) benchmark::DoNotOptimize(summatory(f, {5'000'000}, o));
}
BENCHMARK(BM_Threads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
