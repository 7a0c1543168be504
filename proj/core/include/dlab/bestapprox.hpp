#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dlab/exactnum.hpp"
#include "dlab/lattice.hpp"
#include "dlab/normspace.hpp"

namespace dlab {

using RealMatrix = std::vector<std::vector<ExactReal>>;

struct ApproxProblem {
  size_t m = 0;
  size_t n = 0;
  RealMatrix omega;  // m rows, n columns
  NormDescriptor norm1;
  NormDescriptor norm2;

  ApproxProblem(RealMatrix omega, NormDescriptor norm1, NormDescriptor norm2);
  static ApproxProblem with_max_norms(RealMatrix omega);

  bool max_max() const { return norm1.is_max() && norm2.is_max(); }
  bool all_rational() const;
  ApproxProblem transposed() const;  // Ω^T with max norms
};

struct ApproxRecord {
  IntVector b_hat;
  IntVector b_tilde;
  IntervalReal height;
  IntervalReal quality;
  size_t index = 0;
  bool certified = true;  // false for records of the candidate-restricted tier
};

struct EnumConfig {
  uint64_t budget;
  unsigned threads;
  long max_bits = 1L << 20;

  EnumConfig();
};

// 10^8 unless DLAB_BUDGET is set.
uint64_t default_budget();
unsigned default_threads();

struct QualityEval {
  IntervalReal quality;
  IntVector b_tilde;
  bool resolved = true;               // b_tilde certified optimal (ties broken lexicographically)
  std::optional<Rational> exact_key;  // order-preserving exact key when available
};

QualityEval evaluate_quality(const ApproxProblem& problem, const IntVector& b_hat, long bits);
IntervalReal height_of(const ApproxProblem& problem, const IntVector& b_hat, long bits = 64);

IntervalReal psi(const ApproxProblem& problem, const Rational& t, const Rational& width,
                 const EnumConfig& config = EnumConfig());

std::vector<ApproxRecord> best_approx_sequence(const ApproxProblem& problem, const Rational& height_cap,
                                               const EnumConfig& config = EnumConfig());

// ψ(t) from a record sequence computed at least up to t: L_v for M_v <= t < M_{v+1}.
std::optional<IntervalReal> psi_from_records(const std::vector<ApproxRecord>& records, const Rational& t);

// Extends exhaustive records (complete up to exhaustive_cap) with records found
// among the given candidate b̂ above that cap. Added records are uncertified.
// Stops at the first candidate whose quality cannot be certified with the
// available precision; `truncated` reports that.
struct StructuralResult {
  std::vector<ApproxRecord> records;
  bool truncated = false;
  size_t candidates_used = 0;
};
StructuralResult extend_structural(const ApproxProblem& problem, std::vector<ApproxRecord> exhaustive,
                                   const Rational& exhaustive_cap, const std::vector<IntVector>& candidates,
                                   const EnumConfig& config = EnumConfig());

enum class Boundary { NonStrict, Strict };

// c · radicand^(1/index), compared exactly against rationals.
struct RootBound {
  Rational coeff{1};
  Rational radicand{1};
  unsigned index = 1;

  static RootBound of(const Rational& q) { return RootBound{Rational(1), q, 1}; }
  // Sign of (x - value) for x >= 0.
  int compare(const Rational& x) const;
  Integer floor() const;
  IntervalReal enclose(long bits) const;
};

struct BoxResult {
  bool found = false;
  IntVector b;  // (b̂, b̃)
};

// Decides M_{A,B}(Ω) ∩ Z^{n+m} \ {0} ≠ ∅ with max-norm boxes:
// max_j |(Ω ẑ)_j + z̃_j| (<= or <) A and max_i |ẑ_i| <= B.
BoxResult dirichlet_box_nonempty(const ApproxProblem& problem, const Rational& A, const Rational& B,
                                 Boundary boundary = Boundary::NonStrict, const EnumConfig& config = EnumConfig());
BoxResult dirichlet_box_nonempty(const ApproxProblem& problem, const RootBound& A, const RootBound& B,
                                 Boundary boundary = Boundary::NonStrict, const EnumConfig& config = EnumConfig());

struct RankCheck {
  bool three_independent = false;
  std::vector<IntVector> witnesses;
  size_t solutions = 0;
};

RankCheck minkowski_rank_check(const std::vector<ExactReal>& xi, long Q, const Rational& c,
                               const EnumConfig& config = EnumConfig());

}  // namespace dlab
