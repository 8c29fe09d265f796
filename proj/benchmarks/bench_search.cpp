#include <benchmark/benchmark.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/bound_optimizer.hpp"
#include "moddiv/perfect_numbers.hpp"

namespace {

using namespace moddiv;

void BM_SquarefullCount(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(squarefull_count(x));
}
BENCHMARK(BM_SquarefullCount)->Arg(1'000'000'000)->Arg(60'000'000'000)->Unit(benchmark::kMillisecond);

void BM_PerfectSearch(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_e_inf_perfect(x));
}
BENCHMARK(BM_PerfectSearch)->Arg(1'000'000'000)->Arg(60'000'000'000)->Unit(benchmark::kMillisecond);

void BM_Optimizer(benchmark::State& state) {
  const auto v = state.range(0) == 0 ? ThresholdVariant::base : ThresholdVariant::refined;
  for (auto _ : state) benchmark::DoNotOptimize(solve(v));
}
BENCHMARK(BM_Optimizer)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
