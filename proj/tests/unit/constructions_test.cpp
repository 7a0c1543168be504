#include <gtest/gtest.h>

#include <cmath>

#include "dlab/constructions.hpp"
#include "dlab/errors.hpp"
#include "dlab/real.hpp"
#include "oracles.hpp"

using namespace dlab;

TEST(TwoScale, RecurrenceAndVerification) {
  TwoScaleParams p;
  p.c = Rational(1, 5);
  p.levels = 6;
  TwoScaleVector v = build_two_scale(p);
  const auto& a = v.state.a;
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a[0], 2);
  EXPECT_EQ(a[1], 4);
  for (size_t k = 1; 2 * k + 1 <= a.size(); ++k) {
    Integer expect;
    mpz_pow_ui(expect.get_mpz_t(), a[2 * k - 1].get_mpz_t(), static_cast<unsigned long>(v.state.M[k - 1]));
    EXPECT_EQ(a[2 * k], expect);
    if (2 * k + 2 <= a.size()) {
      // a_{2k+2} = a_{2k+1}·⌈5·a_{2k+1}⌉ for n = 2, c = 1/5.
      EXPECT_EQ(a[2 * k + 1], a[2 * k] * (5 * a[2 * k]));
    }
  }
  EXPECT_NO_THROW(verify_two_scale(v.state));
  EXPECT_FALSE(structural_candidates(v.state).empty());
  EXPECT_LE(v.xi1.eval_bits(40).width(), pow2(-40));
  EXPECT_LE(v.xi2.eval_bits(40).width(), pow2(-40));
}

TEST(TwoScale, TamperedStateFailsVerification) {
  TwoScaleParams p;
  p.levels = 5;
  TwoScaleVector v = build_two_scale(p);
  v.state.a[3] += 1;
  EXPECT_THROW(verify_two_scale(v.state), InvariantViolation);
}

TEST(Kronecker, MatchesBruteForce) {
  IntervalReal l2 = log_rational(Rational(2), 80), l3 = log_rational(Rational(3), 80);
  size_t found = 0;
  for (long target : {10L, 37L, 123L, 250L, 777L}) {
    Rational eps(1, 20);
    double best = 1e9;
    long bk1 = -1;
    for (long k1 = 0; k1 <= 400; ++k1) {
      for (long k2 = 0; k2 <= 400; ++k2) {
        double e = std::fabs(k1 * std::log(2.0) + k2 * std::log(3.0) - static_cast<double>(target));
        if (e < best - 1e-12) {
          best = e;
          bk1 = k1;
        }
      }
    }
    if (best >= 0.05) {
      EXPECT_THROW(kronecker_step(l2, l3, IntervalReal(target), eps, 400), NoPairWithinBound) << target;
      continue;
    }
    ++found;
    KroneckerPair kp = kronecker_step(l2, l3, IntervalReal(target), eps, 400);
    EXPECT_EQ(kp.k1, bk1) << target;
    EXPECT_NEAR(kp.error.midpoint().get_d(), best, 1e-9);
    EXPECT_LT(kp.error.hi(), eps);
  }
  EXPECT_GE(found, 3u);
  EXPECT_THROW(kronecker_step(l2, l3, IntervalReal(Rational(1, 2)), Rational(1, 1000000), 2), NoPairWithinBound);
}

TEST(PrimePower, StructureAndVerification) {
  PrimePowerVector v = build_prime_power(PrimePowerParams{});
  const auto& s = v.state;
  ASSERT_EQ(s.levels(), 3u);
  EXPECT_EQ(s.tau, Rational(2) + Rational(1, 18));
  EXPECT_EQ(s.mu, 1 / (s.tau - 2));
  for (size_t j = 1; j <= 3; ++j) {
    EXPECT_EQ(Integer(s.F[j - 1] % 6), 1);
    EXPECT_EQ(Integer(s.G[j - 1] % 35), 1);
    EXPECT_EQ(elementary_divisors({s.v(j), s.w(j)}), (std::vector<Integer>{1, 1}));
    EXPECT_NEAR(s.log_A(j).midpoint().get_d(), oracle::log_prime_power(s.alpha[j - 1], s.gamma[j - 1], 0, 0), 1e-9);
  }
  PrimePowerVerification ver = verify_prime_power(s);
  EXPECT_TRUE(ver.ok());
  EXPECT_EQ(six_forms(s).size(), 6u * 3 - 2);
  EXPECT_FALSE(structural_candidates(s).empty());
}

TEST(PrimePower, InfeasibleTauRejected) {
  PrimePowerParams p;
  p.tau = Rational(5, 2);
  EXPECT_THROW(build_prime_power(p), std::invalid_argument);
}

TEST(SignVaried, DeterministicAndVerified) {
  PrimePowerParams p;
  p.levels = 2;
  SignVariedMatrix a = build_sign_varied(p, 3, 9), b = build_sign_varied(p, 3, 9);
  EXPECT_EQ(a.state.delta, b.state.delta);
  EXPECT_EQ(a.state.F, b.state.F);
  EXPECT_EQ(a.V.size(), 3u);
  EXPECT_NO_THROW(verify_sign_varied(a.state));
  for (const auto& row : a.state.delta) {
    for (int d : row) EXPECT_TRUE(d == 1 || d == -1);
  }
}

TEST(Compose, BlockDiagonalTransposeExtend) {
  RealMatrix a{{ExactReal(Rational(1, 2))}}, b{{ExactReal(Rational(1, 3))}, {ExactReal(Rational(1, 5))}};
  MatrixBuild bd = block_diagonal({a, b});
  ASSERT_EQ(bd.result.size(), 3u);
  ASSERT_EQ(bd.result[0].size(), 2u);
  EXPECT_EQ(bd.result[0][1].rational(), Rational(0));
  EXPECT_EQ(bd.result[2][1].rational(), Rational(1, 5));
  MatrixBuild t = transpose(bd.result);
  EXPECT_EQ(t.result.size(), 2u);
  EXPECT_EQ(t.result[1][2].rational(), Rational(1, 5));
  MatrixBuild e = extend_columns(b, b);
  EXPECT_EQ(e.result[1].size(), 2u);
  MatrixBuild r = repeated_row({ExactReal(1), ExactReal(2)}, 3);
  EXPECT_EQ(r.result.size(), 3u);
  EXPECT_THROW(extend_columns(a, b), DimensionMismatch);
}

TEST(Compose, ExtensionSamplesInUnitBall) {
  for (uint64_t i = 0; i < 100; ++i) {
    auto x = sample_extension(3, 5, i);
    ASSERT_EQ(x.size(), 3u);
    Rational r2 = 0;
    for (const auto& c : x) {
      r2 += c * c;
      EXPECT_EQ(Integer(c.get_den() & (c.get_den() - 1)), 0);  // power of two
    }
    EXPECT_LE(r2, 1);
    EXPECT_EQ(x, sample_extension(3, 5, i));
  }
}
