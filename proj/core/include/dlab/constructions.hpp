#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlab/bestapprox.hpp"
#include "dlab/exactnum.hpp"
#include "dlab/lattice.hpp"
#include "dlab/normspace.hpp"

namespace dlab {

// ---------------------------------------------------------------------------
// Two-scale vectors: a_{2k+1} = a_{2k}^{M_k}, a_{2k+2} = a_{2k+1}·⌈c⁻¹ a_{2k+1}^{n-1}⌉.

struct TwoScaleParams {
  long n = 2;
  Rational c{1, 2};
  Integer a1{2};
  Integer a2{4};
  std::vector<long> M;  // M_1, M_2, ...; missing entries default to k + 2
  size_t levels = 4;    // number of terms a_1..a_levels, at least 2
  size_t max_bits = 1000000;
};

struct TwoScaleState {
  TwoScaleParams params;
  std::vector<Integer> a;  // a[0] = a_1
  std::vector<long> M;     // schedule actually used
  bool degenerate = false;  // some a_{2k+2} equals a_{2k+1}^n
  std::vector<std::string> warnings;
};

struct TwoScaleVector {
  TwoScaleState state;
  ExactReal xi1;
  ExactReal xi2;
};

TwoScaleVector build_two_scale(const TwoScaleParams& params);
// Throws InvariantViolation naming the first failing level.
void verify_two_scale(const TwoScaleState& state);
// b̂ candidates for the structural tier.
std::vector<IntVector> structural_candidates(const TwoScaleState& state);

// ---------------------------------------------------------------------------
// Exponent search.

struct KroneckerPair {
  long k1 = 0;
  long k2 = 0;
  IntervalReal error;  // |k1·a + k2·b − target|
};

// Nonnegative k1, k2 <= bound with certified error < eps, minimal error; ties
// to the smaller k1. Throws NoPairWithinBound.
KroneckerPair kronecker_step(const IntervalReal& log_a, const IntervalReal& log_b, const IntervalReal& target,
                             const Rational& eps, long bound);

// ---------------------------------------------------------------------------
// Prime-power vectors: A_j = 2^α 3^γ, B_j = 5^β 7^δ, ξ = (Σ 1/A_j, Σ 1/B_j).

struct PrimePowerParams {
  Rational exponent{2};         // n/m
  Rational c{1, 100};
  std::optional<Rational> tau;  // default exponent + 1/(2(exponent+1)^2)
  size_t levels = 3;
  std::optional<NormDescriptor> norm1;  // norm on R^2 giving d_2; max norm when absent
  IntervalReal gamma{1};                // Γ factor in r = c⁻¹Γ⁻¹d₂^e
  Rational eps0{1, 10};
  size_t max_bits = 1000000;
};

struct PrimePowerState {
  PrimePowerParams params;
  Rational tau;
  Rational mu;
  IntervalReal d2;
  IntervalReal log_r;
  std::vector<long> alpha, gamma, beta, delta;
  std::vector<Integer> A, B, F, G;
  std::vector<std::string> warnings;

  size_t levels() const { return A.size(); }
  Rational eps(size_t j) const;  // ε_j for 1-based j
  IntVector v(size_t j) const;   // (A_j, 0, −F_j)
  IntVector w(size_t j) const;   // (0, B_j, −G_j)
  // Certified log A_j, log B_j from the exponents.
  IntervalReal log_A(size_t j, long bits = 128) const;
  IntervalReal log_B(size_t j, long bits = 128) const;
};

struct PrimePowerVector {
  PrimePowerState state;
  ExactReal xi1;
  ExactReal xi2;
};

PrimePowerVector build_prime_power(const PrimePowerParams& params);

struct LevelCheck {
  size_t j = 0;
  bool congruences = false;
  bool gcds = false;
  bool interleaving = false;
  bool accto = false;
  bool saturation = false;
  std::optional<bool> calibration;  // needs level j+1
  std::optional<IntervalReal> calibration_value;
};

struct PrimePowerVerification {
  std::vector<LevelCheck> levels;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

PrimePowerVerification verify_prime_power(const PrimePowerState& state);
std::vector<IntVector> structural_candidates(const PrimePowerState& state);
// ±1 combinations of the three-vectors allowed for best approximations of large norm.
struct NamedForm {
  std::string name;
  size_t j = 0;
  IntVector b;  // (b̂, b̃)
};
std::vector<NamedForm> six_forms(const PrimePowerState& state);

// ---------------------------------------------------------------------------
// Sign-varied m×2 matrices.

struct SignVariedState {
  PrimePowerState base;
  size_t m = 1;
  uint64_t seed = 0;
  std::vector<std::vector<int>> delta;       // delta[k][j-1]
  std::vector<std::vector<int>> delta_star;  // delta_star[k][j-1]
  std::vector<std::vector<Integer>> F;       // F[k][j-1]
  std::vector<std::vector<Integer>> G;
  std::vector<std::vector<int>> patterns;  // distinct observed column patterns
  IntervalReal gamma;
};

struct SignVariedMatrix {
  SignVariedState state;
  RealMatrix V;  // m×2
};

// explicit_signs, when given, supplies delta and delta_star (rows × levels)
// instead of the seeded stream.
SignVariedMatrix build_sign_varied(const PrimePowerParams& params, size_t m, uint64_t seed,
                                   const std::optional<NormDescriptor>& norm2 = std::nullopt,
                                   const std::optional<std::pair<std::vector<std::vector<int>>,
                                                                 std::vector<std::vector<int>>>>& explicit_signs =
                                       std::nullopt);
// Throws InvariantViolation on a failing congruence.
void verify_sign_varied(const SignVariedState& state);

// ---------------------------------------------------------------------------
// Matrix composition.

struct MatrixBuild {
  enum class Kind { RepeatedRowV, BlockDiagonal, ExtendColumns, Transpose };
  Kind kind = Kind::RepeatedRowV;
  RealMatrix result;
  std::string provenance;
};

MatrixBuild repeated_row(const std::vector<ExactReal>& xi, size_t m);
MatrixBuild block_diagonal(const std::vector<RealMatrix>& blocks);
MatrixBuild extend_columns(const RealMatrix& V, const RealMatrix& B);
MatrixBuild transpose(const RealMatrix& omega);
RealMatrix row_matrix(const std::vector<ExactReal>& xi);
RealMatrix rational_matrix(const std::vector<std::vector<Rational>>& q);

// Uniform point of the Euclidean unit ball on the grid 2^-20 (rejection
// sampling); deterministic in (seed, index).
std::vector<Rational> sample_extension(size_t dims, uint64_t seed, uint64_t index = 0);

}  // namespace dlab
