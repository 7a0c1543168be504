#include <benchmark/benchmark.h>

#include "dlab/bestapprox.hpp"
#include "dlab/transference.hpp"

using namespace dlab;

namespace {

EnumConfig single_thread() {
  EnumConfig c;
  c.threads = 1;
  return c;
}

void BM_SequenceQuadratic1x2(benchmark::State& state) {
  ApproxProblem pb = ApproxProblem::with_max_norms({{quadratic_irrational(0, 1, 2), quadratic_irrational(0, 1, 3)}});
  const Rational cap(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_approx_sequence(pb, cap, single_thread()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SequenceQuadratic1x2)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_SequenceRational2x2(benchmark::State& state) {
  RealMatrix m{{ExactReal(Rational(3, 7)), ExactReal(Rational(2, 9))},
               {ExactReal(Rational(1, 5)), ExactReal(Rational(-4, 11))}};
  ApproxProblem pb = ApproxProblem::with_max_norms(m);
  const Rational cap(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_approx_sequence(pb, cap, single_thread()));
}
BENCHMARK(BM_SequenceRational2x2)->Arg(50)->Arg(200);

void BM_SequenceGoldenRatio(benchmark::State& state) {
  ApproxProblem pb = ApproxProblem::with_max_norms({{quadratic_irrational(Rational(1, 2), Rational(1, 2), 5)}});
  for (auto _ : state) benchmark::DoNotOptimize(best_approx_sequence(pb, Rational(state.range(0)), single_thread()));
}
BENCHMARK(BM_SequenceGoldenRatio)->Arg(10000)->Arg(100000);

void BM_DirichletBox(benchmark::State& state) {
  ApproxProblem pb = ApproxProblem::with_max_norms({{quadratic_irrational(0, 1, 2), quadratic_irrational(0, 1, 3)}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(dirichlet_box_nonempty(pb, Rational(1, 1000), Rational(state.range(0)),
                                                    Boundary::NonStrict, single_thread()));
  }
}
BENCHMARK(BM_DirichletBox)->Arg(32)->Arg(128);

void BM_VerifyTransference(benchmark::State& state) {
  RationalMatrix om = random_rational_matrix(1, 2, 50, 0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_transference(om, Rational(1, 8), Rational(16), Rational(1), single_thread()));
  }
}
BENCHMARK(BM_VerifyTransference);

}  // namespace
