#include <random>

#include <benchmark/benchmark.h>

#include "moddiv/arithmetic_core.hpp"
#include "moddiv/euler_products.hpp"
#include "moddiv/multiplicative.hpp"

namespace {

using namespace moddiv;

void BM_SievePrimes(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sieve_primes(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SievePrimes)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

void BM_FactorizeU64(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> ns(256);
  for (auto& n : ns) n = rng() >> state.range(0);
  for (auto _ : state) {
    for (auto n : ns) benchmark::DoNotOptimize(factorize_u64(n | 1));
  }
  state.SetItemsProcessed(state.iterations() * ns.size());
}
// Shift 1 gives 63-bit inputs (Pollard rho), shift 34 gives 30-bit ones.
BENCHMARK(BM_FactorizeU64)->Arg(34)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_EvaluateBig(benchmark::State& state) {
  const Factorization f = factorize(BigInt("1307484087615221689700651798824550400000"));
  const auto& s = function_by_id("sigma_e_inf");
  for (auto _ : state) benchmark::DoNotOptimize(s(f));
}
BENCHMARK(BM_EvaluateBig);

void BM_LeadingConstant(benchmark::State& state) {
  LeadingConstantOptions o;
  o.prime_limit = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(leading_constant("E_sigma", o));
}
BENCHMARK(BM_LeadingConstant)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
