#include <gtest/gtest.h>

#include <cmath>

#include "dlab/errors.hpp"
#include "dlab/spectrum.hpp"
#include "test_util.hpp"

using namespace dlab;
using testutil::config;

TEST(Theta, GoldenRatioWindow) {
  auto phi = quadratic_irrational(Rational(1, 2), Rational(1, 2), 5);
  auto rec = best_approx_sequence(ApproxProblem::with_max_norms({{phi}}), 100000, config());
  ThetaOptions opt;
  opt.v_min = 10;
  SpectrumEstimate e = theta_estimate(rec, 1, opt);
  EXPECT_NEAR(e.estimate().midpoint().get_d(), (1 + std::sqrt(5.0)) / (2 * std::sqrt(5.0)), 1e-4);
  // q‖qφ‖ → 1/√5 along the Fibonacci denominators.
  EXPECT_NEAR(e.theta_inf.midpoint().get_d(), 1 / std::sqrt(5.0), 1e-3);
  EXPECT_TRUE(e.converged);
  EXPECT_FALSE(e.terminal);
  ASSERT_GE(e.rows.size(), 2u);
  EXPECT_FALSE(e.rows.back().sup_term.has_value());  // no M_{v+1} past the cap
  for (size_t i = 0; i + 1 < e.rows.size(); ++i) {
    ASSERT_TRUE(e.rows[i].sup_term.has_value());
    EXPECT_LT(e.rows[i].inf_term.hi(), e.rows[i].sup_term->lo());
  }
}

TEST(Theta, RationalInputIsTerminal) {
  auto rec = best_approx_sequence(ApproxProblem::with_max_norms({{ExactReal(Rational(5, 13))}}), 50, config());
  SpectrumEstimate e = theta_estimate(rec, 1);
  EXPECT_TRUE(e.terminal);
  EXPECT_EQ(e.estimate(), IntervalReal(0));
}

TEST(Theta, GridCheckConsistentWithJumps) {
  auto rec = best_approx_sequence(
      ApproxProblem::with_max_norms({{quadratic_irrational(0, 1, 2), quadratic_irrational(0, 1, 7)}}), 300, config());
  GridCheck g = tT_grid_check(rec, 2, 4);
  EXPECT_TRUE(g.consistent);
  EXPECT_GT(g.points, 0u);
  EXPECT_LE(g.grid_max.lo(), g.jump_max.hi());
}

TEST(Classification, PrimePowerRecordsUseSixForms) {
  PrimePowerVector v = build_prime_power(PrimePowerParams{});
  ApproxProblem pb = ApproxProblem::with_max_norms(row_matrix({v.xi1, v.xi2}));
  auto ex = best_approx_sequence(pb, 1000, config());
  auto st = extend_structural(pb, ex, 1000, structural_candidates(v.state), config());
  ClassificationReport r = classify_records(v.state, st.records);
  ASSERT_EQ(r.verdicts.size(), st.records.size());
  EXPECT_EQ(r.others_above_threshold, 0u);
  for (const auto& verdict : r.verdicts) {
    if (verdict.height.lo() >= v.state.A[0]) {
      EXPECT_NE(verdict.form, "Other");
    }
  }
  ASSERT_TRUE(r.threshold_level.has_value());
  EXPECT_EQ(*r.threshold_level, 1u);
}

TEST(Classification, ExplicitFormsAndOther) {
  std::vector<NamedForm> forms{{"e1", 1, {1, 0, 0}}};
  ApproxRecord a;
  a.b_hat = {1, 0};
  a.b_tilde = {0};
  a.height = 1;
  a.quality = Rational(1, 3);
  ApproxRecord b = a;
  b.b_hat = {0, 1};
  b.height = 1;
  auto r = classify_records(forms, {a, b}, NormDescriptor::max(2));
  EXPECT_EQ(r.verdicts[0].form, "e1");
  EXPECT_EQ(r.verdicts[1].form, "Other");
  EXPECT_EQ(r.others, 1u);
}

TEST(Membership, DirichletWitnessesForBadlyApproximable) {
  ApproxProblem pb = ApproxProblem::with_max_norms({{quadratic_irrational(0, 1, 2)}});
  MembershipReport m = membership_probe(pb, Rational(1, 10), {10, 100, 1000}, config());
  EXPECT_EQ(m.normalized.size(), 3u);
  EXPECT_GT(m.bad_lower_bound.lo(), 0);
  EXPECT_EQ(m.label, "finite-height evidence");
}

TEST(Survival, DegenerateExtensionFails) {
  PrimePowerParams p;
  p.levels = 2;
  PrimePowerVector v = build_prime_power(p);
  RealMatrix base = row_matrix({v.xi1, v.xi2});
  auto rec = best_approx_sequence(ApproxProblem::with_max_norms(base), 64, config());
  ASSERT_GE(rec.size(), 2u);
  SurvivalOutcome bad = survives(base, rec, 1, {{v.xi1 + v.xi2, ExactReal(0)}}, config());
  EXPECT_FALSE(bad.survived);
  EXPECT_FALSE(bad.better.empty());
}

TEST(IntegerRelation, FindsRationalRelationAndNoneForSqrt2) {
  RelationResult r = integer_relation_probe({ExactReal(Rational(1, 3)), ExactReal(Rational(1, 2))}, 6, config());
  EXPECT_TRUE(r.found);
  ASSERT_EQ(r.coeffs.size(), 3u);
  EXPECT_EQ(r.coeffs[0] * Rational(1, 3) + r.coeffs[1] * Rational(1, 2) + r.coeffs[2], 0);
  RelationResult none = integer_relation_probe({quadratic_irrational(0, 1, 2)}, 10, config());
  EXPECT_FALSE(none.found);
  EXPECT_EQ(none.checked, 55u);  // c_1 in 1..h for each h <= 10
}

TEST(Membership, GoldenRatioViolationsJustBelowRecords) {
  ApproxProblem pb = ApproxProblem::with_max_norms({{quadratic_irrational(Rational(1, 2), Rational(1, 2), 5)}});
  // At F_k itself tψ(t) ≈ 1/√5 < 0.7; at F_{k+1} - 1 it approaches φ/√5 ≈ 0.7236.
  MembershipReport at = membership_probe(pb, Rational(7, 10), {89, 144, 233, 377, 610, 987}, config());
  EXPECT_TRUE(at.sing_violation_heights.empty());
  MembershipReport below = membership_probe(pb, Rational(7, 10), {143, 232, 376, 609, 986}, config());
  EXPECT_EQ(below.sing_violation_heights.size(), 5u);
  EXPECT_GT(below.bad_lower_bound.lo(), Rational(7, 10));
}

TEST(IntegerRelation, SignVariedEntriesHaveNoSmallRelation) {
  PrimePowerParams p;
  p.levels = 3;
  SignVariedMatrix sv = build_sign_varied(p, 2, 4);
  std::vector<ExactReal> values;
  for (const auto& row : sv.V) values.insert(values.end(), row.begin(), row.end());
  RelationResult r = integer_relation_probe(values, 2, config());
  EXPECT_FALSE(r.found);
  EXPECT_GT(r.checked, 0u);
}
