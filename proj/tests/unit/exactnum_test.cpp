#include <gtest/gtest.h>

#include <cmath>

#include "dlab/errors.hpp"
#include "dlab/exactnum.hpp"
#include "dlab/lattice.hpp"
#include "dlab/prng.hpp"
#include "dlab/parallel.hpp"
#include "dlab/real.hpp"
#include "oracles.hpp"

using namespace dlab;

TEST(ParseRational, AcceptedForms) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("1e-12"), Rational(1, 1000000000000L));
  EXPECT_EQ(parse_rational("2^-20"), pow2(-20));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(Rationals, Helpers) {
  EXPECT_EQ(floor_q(Rational(-7, 2)), -4);
  EXPECT_EQ(ceil_q(Rational(-7, 2)), -3);
  EXPECT_EQ(abs_q(Rational(-2, 3)), Rational(2, 3));
  EXPECT_EQ(pow_q(Rational(2, 3), 3), Rational(8, 27));
  EXPECT_EQ(ratio(Integer(6), Integer(-4)), Rational(-3, 2));
  EXPECT_EQ(width_bits(Rational(1, 1000)), 10);
  EXPECT_EQ(bit_length(Integer(255)), 8u);
  EXPECT_EQ(to_string(Rational(-3, 4)), "-3/4");
}

TEST(IntervalReal, ArithmeticEnclosesPointwiseResults) {
  oracle::Lcg rng(11);
  for (int t = 0; t < 300; ++t) {
    auto f = [&] { auto x = rng.fraction(40); return Rational(x.num, x.den); };
    Rational a = f(), b = f(), c = f(), d = f();
    IntervalReal x(std::min(a, b), std::max(a, b)), y(std::min(c, d), std::max(c, d));
    for (const Rational& p : std::vector<Rational>{a, b, (a + b) / 2}) {
      for (const Rational& q : std::vector<Rational>{c, d, (c + d) / 2}) {
        EXPECT_TRUE((x + y).contains(Rational(p + q)));
        EXPECT_TRUE((x - y).contains(Rational(p - q)));
        EXPECT_TRUE((x * y).contains(Rational(p * q)));
        if (!y.contains(Rational(0))) {
          EXPECT_TRUE((x / y).contains(Rational(p / q)));
        }
      }
    }
    EXPECT_TRUE(x.abs().contains(abs_q(a)));
    EXPECT_TRUE(x.pow(3).contains(pow_q(b, 3)));
  }
}

TEST(IntervalReal, OrderingAndRounding) {
  IntervalReal a(Rational(1), Rational(2)), b(Rational(3), Rational(4)), c(Rational(3, 2), Rational(5, 2));
  EXPECT_EQ(cmp_certified(a, b), Ordering::Less);
  EXPECT_EQ(cmp_certified(b, a), Ordering::Greater);
  EXPECT_EQ(cmp_certified(a, c), Ordering::Overlap);
  IntervalReal r = IntervalReal(Rational(1, 3)).round_out(10);
  EXPECT_TRUE(r.contains(Rational(1, 3)));
  EXPECT_LE(r.width(), pow2(-9));
  EXPECT_EQ(IntervalReal(Rational(5, 2)).floor(), Integer(2));
  EXPECT_FALSE(IntervalReal(Rational(9, 10), Rational(11, 10)).floor().has_value());
  EXPECT_THROW(a / IntervalReal(Rational(-1), Rational(1)), std::domain_error);
}

TEST(ExactReal, QuadraticIrrationalEnclosures) {
  ExactReal s = quadratic_irrational(0, 1, 2);
  for (long bits : {10L, 64L, 200L}) {
    IntervalReal x = s.eval_bits(bits);
    EXPECT_LE(x.width(), pow2(-bits));
    EXPECT_TRUE((x * x).contains(Rational(2)));
  }
  EXPECT_FALSE(s.is_rational());
  ExactReal phi = quadratic_irrational(Rational(1, 2), Rational(1, 2), 5);
  double d = oracle::quadratic_distance(Rational(1, 2), Rational(1, 2), Integer(5), 1, 0);
  EXPECT_NEAR(phi.eval_bits(60).midpoint().get_d(), d, 1e-15);
}

TEST(ExactReal, RationalAndCombinations) {
  ExactReal q(Rational(2, 7));
  EXPECT_EQ(q.rational(), Rational(2, 7));
  ExactReal s = quadratic_irrational(0, 1, 3);
  ExactReal z = linear_combination({{Rational(2), s}, {Rational(-1), s + s}}, Rational(1, 5));
  IntervalReal v = z.eval_bits(80);
  EXPECT_TRUE(v.contains(Rational(1, 5)));
  EXPECT_LE(v.width(), pow2(-80));
}

TEST(ReciprocalSeries, PrefixAndTailBracketTheSum) {
  // Σ 1/2^(2^k), k = 0..5, remainder bounded by the next denominator 2^64.
  std::vector<Integer> den;
  for (int k = 0; k < 6; ++k) den.push_back(Integer(1) << (1 << k));
  ReciprocalSeries series(den, std::vector<int>(den.size(), 1), Integer(1) << 64, "test");
  Rational full = series.prefix(6);
  for (size_t k = 0; k < 6; ++k) {
    auto [lo, hi] = series.tail(k);
    Rational rest = full - series.prefix(k);
    EXPECT_LE(lo, rest);
    EXPECT_GE(hi, rest);
  }
  IntervalReal x = series.enclose(40);
  EXPECT_GE(x.hi(), full);
  EXPECT_LE(x.width(), pow2(-40));
  EXPECT_THROW(series.enclose(300), InsufficientLevels);
}

TEST(Lattice, ElementaryDivisorsMatchOracle) {
  oracle::Lcg rng(3);
  for (int t = 0; t < 200; ++t) {
    IntVector r1(3), r2(3);
    for (auto& x : r1) x = rng.uniform(-30, 30);
    for (auto& x : r2) x = rng.uniform(-30, 30);
    EXPECT_EQ(elementary_divisors({r1, r2}), oracle::elementary_divisors_2x3(r1, r2));
  }
  EXPECT_EQ(integer_rank({{1, 2, 3}, {2, 4, 6}}), 1u);
  EXPECT_EQ(integer_rank({{1, 0}, {0, 1}}), 2u);
  IntVector v{3, -2, 0};
  normalize_sign_last_positive(v);
  EXPECT_EQ(v, (IntVector{-3, 2, 0}));
}

TEST(CounterRng, PureAndStreamSeparated) {
  CounterRng a(42, 0), b(42, 0), c(42, 1);
  EXPECT_EQ(a.at(7), b.at(7));
  EXPECT_NE(a.at(7), c.at(7));
  uint64_t counter = 0;
  for (int i = 0; i < 1000; ++i) EXPECT_LT(a.uniform(13, counter), 13u);
  EXPECT_GE(counter, 1000u);
  EXPECT_EQ(CounterRng::kAlgorithm, "splitmix64-ctr-v1");
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  for (unsigned threads : {1u, 3u}) {
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), threads, [&](size_t i) { hit[i] += 1; });
    for (int h : hit) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, threads, [](size_t i) { if (i == 5) throw std::runtime_error("x"); }),
                 std::runtime_error);
  }
}

TEST(Real, TranscendentalEnclosures) {
  IntervalReal pi = pi_enclosure(100);
  EXPECT_TRUE(pi.lo() < Rational(355, 113) && pi.hi() > Rational(333, 106));
  IntervalReal l = log_rational(Rational(2), 60);
  EXPECT_NEAR(l.midpoint().get_d(), std::log(2.0), 1e-15);
  IntervalReal e = exp_enclosure(l, 100);
  EXPECT_TRUE(e.contains(Rational(2)));
  EXPECT_TRUE(sqrt_enclosure(IntervalReal(9), 64).contains(Rational(3)));
  EXPECT_TRUE(pow_enclosure(IntervalReal(8), Rational(2, 3), 64).contains(Rational(4)));
}
