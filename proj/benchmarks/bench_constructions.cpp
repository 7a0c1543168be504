#include <benchmark/benchmark.h>

#include "dlab/constructions.hpp"
#include "dlab/real.hpp"

using namespace dlab;

namespace {

void BM_KroneckerStep(benchmark::State& state) {
  IntervalReal l2 = log_rational(Rational(2), 128), l3 = log_rational(Rational(3), 128);
  const IntervalReal target(Rational(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kronecker_step(l2, l3, target, Rational(1, 100), state.range(0)));
  }
}
BENCHMARK(BM_KroneckerStep)->Arg(1000)->Arg(10000);

void BM_BuildTwoScale(benchmark::State& state) {
  TwoScaleParams p;
  p.levels = static_cast<size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_two_scale(p));
}
BENCHMARK(BM_BuildTwoScale)->Arg(6)->Arg(8);

void BM_BuildPrimePower(benchmark::State& state) {
  PrimePowerParams p;
  p.levels = static_cast<size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_prime_power(p));
}
BENCHMARK(BM_BuildPrimePower)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_VerifyPrimePower(benchmark::State& state) {
  PrimePowerVector v = build_prime_power(PrimePowerParams{});
  for (auto _ : state) benchmark::DoNotOptimize(verify_prime_power(v.state));
}
BENCHMARK(BM_VerifyPrimePower)->Unit(benchmark::kMillisecond);

}  // namespace
