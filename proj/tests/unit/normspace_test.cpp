#include <gtest/gtest.h>

#include "dlab/normspace.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {
std::vector<Rational> random_vector(oracle::Lcg& rng, size_t dim) {
  std::vector<Rational> v;
  for (size_t i = 0; i < dim; ++i) {
    auto f = rng.fraction(20);
    v.emplace_back(f.num, f.den);
    v.back().canonicalize();
  }
  return v;
}
}  // namespace

TEST(Norms, ClosedFormValues) {
  EXPECT_EQ(NormDescriptor::max(3).eval(std::vector<Rational>{1, -5, 2}), IntervalReal(5));
  EXPECT_TRUE(NormDescriptor::p(2, 2).eval(std::vector<Rational>{3, 4}, 64).contains(Rational(5)));
  EXPECT_EQ(NormDescriptor::p(3, 1).eval(std::vector<Rational>{1, -2, 3}), IntervalReal(6));
  auto w = NormDescriptor::weighted_max({Rational(2), Rational(1, 3)});
  EXPECT_EQ(w.eval(std::vector<Rational>{Rational(1, 2), 6}), IntervalReal(2));
}

TEST(Norms, NormAxiomsOnSamples) {
  oracle::Lcg rng(5);
  std::vector<NormDescriptor> norms{NormDescriptor::max(3), NormDescriptor::p(3, Rational(3, 2)),
                                    NormDescriptor::weighted_max({1, 2, Rational(1, 2)})};
  LinearFunctionalNorm lf;
  lf.outer = LinearFunctionalNorm::Outer::Sum;
  lf.functionals = {{1, 1, 0}, {1, -1, 0}, {0, 0, 1}};
  norms.push_back(NormDescriptor::linear_functionals(3, lf, 1, 3));
  for (const auto& n : norms) {
    for (int t = 0; t < 100; ++t) {
      auto x = random_vector(rng, 3), y = random_vector(rng, 3);
      std::vector<Rational> s(3), k(3);
      for (size_t i = 0; i < 3; ++i) {
        s[i] = x[i] + y[i];
        k[i] = Rational(-3, 2) * x[i];
      }
      IntervalReal nx = n.eval(x, 80), ny = n.eval(y, 80), ns = n.eval(s, 80), nk = n.eval(k, 80);
      EXPECT_LE(ns.lo(), (nx + ny).hi()) << describe(n);
      EXPECT_LE(nk.lo(), (IntervalReal(Rational(3, 2)) * nx).hi());
      EXPECT_GE(nk.hi(), (IntervalReal(Rational(3, 2)) * nx).lo());
      IntervalReal mx = NormDescriptor::max(3).eval(x);
      EXPECT_LE((IntervalReal(n.equiv_lo()) * mx).lo(), nx.hi());
      EXPECT_GE((IntervalReal(n.equiv_hi()) * mx).hi(), nx.lo());
    }
  }
}

TEST(Norms, CustomRejectsWrongEquivalenceConstants) {
  LinearFunctionalNorm lf;
  lf.functionals = {{2, 0}, {0, 2}};
  EXPECT_THROW(NormDescriptor::linear_functionals(2, lf, 1, 1), std::invalid_argument);
  EXPECT_NO_THROW(NormDescriptor::linear_functionals(2, lf, 2, 2));
}

TEST(Norms, ProjectionAndExpanding) {
  auto p = project_norm(NormDescriptor::weighted_max({1, 5, 3}), {0, 2});
  EXPECT_EQ(p.dimension(), 2u);
  EXPECT_EQ(p.eval(std::vector<Rational>{1, 1}), IntervalReal(3));
  EXPECT_TRUE(is_expanding(NormDescriptor::p(4, 2), 10).closed_form);
  LinearFunctionalNorm lf;
  lf.functionals = {{1, 1}, {1, -1}};
  auto rotated = NormDescriptor::linear_functionals(2, lf, 1, 2);
  auto r = is_expanding(rotated, 200, 1);
  EXPECT_FALSE(r.closed_form);
  EXPECT_EQ(r.verdict, ExpandingReport::Verdict::CertifiedOnSamples);
}

TEST(Norms, ConstantsForMaxNorms) {
  NormConstants c = norm_constants(NormDescriptor::max(2), NormDescriptor::max(3));
  EXPECT_EQ(c.d1, IntervalReal(1));
  EXPECT_EQ(c.d2, IntervalReal(1));
  EXPECT_EQ(c.gamma_allones, IntervalReal(1));
  EXPECT_EQ(max_over_vertices(NormDescriptor::p(4, 1)), IntervalReal(4));
}
