#include <benchmark/benchmark.h>

#include "dlab/exactnum.hpp"
#include "dlab/real.hpp"

using namespace dlab;

namespace {

void BM_QuadraticEnclose(benchmark::State& state) {
  ExactReal x = quadratic_irrational(Rational(1, 3), Rational(2, 7), 11);
  for (auto _ : state) benchmark::DoNotOptimize(x.eval_bits(state.range(0)));
}
BENCHMARK(BM_QuadraticEnclose)->Arg(64)->Arg(1024)->Arg(16384);

void BM_ReciprocalSeriesEnclose(benchmark::State& state) {
  std::vector<Integer> den{Integer(2)};
  for (int k = 0; k < 5; ++k) den.push_back(den.back() * den.back() * 3);
  Integer next = den.back() * den.back();
  ExactReal x = reciprocal_series(den, std::vector<int>(den.size(), 1), next, "bench");
  for (auto _ : state) benchmark::DoNotOptimize(x.eval_bits(state.range(0)));
}
BENCHMARK(BM_ReciprocalSeriesEnclose)->Arg(64)->Arg(100);

void BM_LogEnclosure(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(log_rational(Rational(7, 5), state.range(0)));
}
BENCHMARK(BM_LogEnclosure)->Arg(128)->Arg(4096);

void BM_IntervalProduct(benchmark::State& state) {
  IntervalReal a = quadratic_irrational(0, 1, 2).eval_bits(state.range(0));
  IntervalReal b = quadratic_irrational(0, 1, 3).eval_bits(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_IntervalProduct)->Arg(64)->Arg(4096);

}  // namespace
