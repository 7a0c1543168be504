#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlab/bestapprox.hpp"
#include "dlab/constructions.hpp"

namespace dlab {

struct ThetaRow {
  size_t v = 0;
  IntervalReal height;
  IntervalReal quality;
  std::optional<IntervalReal> next_height;
  std::optional<IntervalReal> sup_term;  // L_v · M_{v+1}^e
  IntervalReal inf_term;                 // L_v · M_v^e
  bool certified = true;
};

struct SpectrumEstimate {
  Rational exponent;
  IntervalReal theta_sup;  // sup over the window of L_v · M_{v+1}^e
  IntervalReal theta_inf;  // inf over the window of L_v · M_v^e
  size_t v_min = 0;
  size_t v_max = 0;
  std::vector<ThetaRow> rows;
  bool terminal = false;   // the sequence ends with L = 0, so Θ = 0
  bool converged = false;  // last three running window maxima within the relative tolerance
  std::vector<std::string> notes;

  IntervalReal estimate() const { return terminal ? IntervalReal(0) : theta_sup; }
};

struct ThetaOptions {
  std::optional<size_t> v_min;  // 1-based, inclusive
  std::optional<size_t> v_max;
  bool include_uncertified = false;
  Rational rel_tol{1, 20};
  long bits = 96;
};

SpectrumEstimate theta_estimate(const std::vector<ApproxRecord>& seq, const Rational& exponent,
                                const ThetaOptions& options = ThetaOptions());

// Running max of t^e ψ(t) on the grid M_1 + i/k below the last record height,
// against the running max of L_v M_{v+1}^e. The grid may only approach the
// jump value from below: grid <= jump, grid >= L_v (M_{v+1} - 1/k)^e.
struct GridCheck {
  IntervalReal grid_max;
  IntervalReal jump_max;
  IntervalReal jump_max_shifted;
  bool consistent = false;
  size_t points = 0;
};
GridCheck tT_grid_check(const std::vector<ApproxRecord>& seq, const Rational& exponent, long per_unit);

struct RecordVerdict {
  size_t v = 0;
  std::string form;  // "Other" when no form matches
  size_t j = 0;
  int sign = 1;
  IntervalReal height;
  bool certified = true;
};

struct ClassificationReport {
  std::vector<RecordVerdict> verdicts;
  // Smallest ‖v̂_j‖ from which every later record classifies.
  std::optional<IntervalReal> threshold_height;
  std::optional<size_t> threshold_level;
  size_t others = 0;
  size_t others_above_threshold = 0;
};

ClassificationReport classify_records(const std::vector<NamedForm>& forms, const std::vector<ApproxRecord>& seq,
                                      const NormDescriptor& norm1);
ClassificationReport classify_records(const PrimePowerState& state, const std::vector<ApproxRecord>& seq);
ClassificationReport classify_records(const SignVariedState& state, const std::vector<ApproxRecord>& seq);
std::vector<NamedForm> six_forms(const SignVariedState& state);

struct MembershipReport {
  std::vector<Rational> heights;
  std::vector<IntervalReal> normalized;  // t^e ψ(t)
  std::vector<Rational> di_witness_heights;
  std::vector<Rational> sing_violation_heights;
  IntervalReal bad_lower_bound;  // min of t^e ψ(t) over the heights
  std::string label = "finite-height evidence";
};

MembershipReport membership_probe(const ApproxProblem& problem, const Rational& c, const std::vector<Rational>& heights,
                                  const EnumConfig& config = EnumConfig());

struct SurvivalOutcome {
  bool survived = false;
  bool embedded_identity = false;  // the best approximation at T_v is the embedded b_v
  IntVector better;                // a point beating L_v when not survived
};

struct SurvivalReport {
  size_t v = 0;
  IntervalReal L_v;
  Rational T_v;
  size_t trials = 0;
  size_t survivors = 0;
  size_t identity_holds = 0;
  std::vector<bool> survived;
  std::optional<IntervalReal> delta;  // covering bound Δ
  std::optional<IntervalReal> floor;  // 1 − Δ/λ(B_{n−2}), clamped at 0
  double fraction() const { return trials ? static_cast<double>(survivors) / static_cast<double>(trials) : 0.0; }
};

// base is m×2 (row ξ for m = 1); ζ = (base, γ) with γ an m×dims block.
SurvivalOutcome survives(const RealMatrix& base, const std::vector<ApproxRecord>& base_records, size_t v,
                         const RealMatrix& extension, const EnumConfig& config = EnumConfig());

SurvivalReport survival_sample(const RealMatrix& base, size_t dims, size_t trials, size_t v, uint64_t seed,
                               const EnumConfig& config = EnumConfig());

struct RelationResult {
  bool found = false;
  IntVector coeffs;  // c_1..c_k followed by the constant c_0
  size_t checked = 0;  // coefficient vectors (c_1..c_k) examined
  std::string label = "finite-height evidence";
};

// Throws CertificationFailure when a candidate cannot be separated from zero.
RelationResult integer_relation_probe(const std::vector<ExactReal>& values, long height_bound,
                                      const EnumConfig& config = EnumConfig());

}  // namespace dlab
