#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlab/bestapprox.hpp"
#include "dlab/exactnum.hpp"
#include "dlab/lattice.hpp"

namespace dlab {

using RationalMatrix = std::vector<std::vector<Rational>>;

// M_{A,B}(Ω) (primal) or M̂_{A,B}(Ω) (dual) for an m×n matrix Ω, points z ∈ Z^{n+m}.
//   primal: max_j |Σ_i Ω_{j,i} z_i + z_{n+j}| <= A, max_i |z_i| <= B
//   dual:   max_i |z_i − Σ_j Ω_{j,i} z_{n+j}| <= B, max_j |z_{n+j}| <= A
struct TransferBox {
  enum class Orientation { Primal, Dual };
  RationalMatrix omega;
  Rational A;
  Rational B;
  Orientation orientation = Orientation::Primal;

  TransferBox(RationalMatrix omega, Rational A, Rational B, Orientation orientation = Orientation::Primal);

  size_t m() const { return omega.size(); }
  size_t n() const { return omega.empty() ? 0 : omega[0].size(); }
  bool contains(const IntVector& z) const;
  // Integer points of the box, excluding 0, in lexicographic order. Throws
  // BudgetExceeded when the bounding box is larger than the budget.
  std::vector<IntVector> points(uint64_t budget) const;
  BoxResult nonzero_point(const EnumConfig& config = EnumConfig()) const;
};

struct DualParams {
  long n = 1;
  long m = 1;
  Rational C{1};
  RootBound A_star;  // C (Aⁿ B^{1−n})^{1/(n+m−1)}
  RootBound B_star;  // C (A^{1−m} Bᵐ)^{1/(n+m−1)}
  IntervalReal A_star_value;
  IntervalReal B_star_value;
};

DualParams dual_params(long n, long m, const Rational& A, const Rational& B, const Rational& C, long bits = 96);

enum class TransferVerdict { ImplicationHolds, PrimalEmpty, CounterexampleAtThisC };
std::string to_string(TransferVerdict v);

struct TransferCheck {
  TransferVerdict verdict = TransferVerdict::PrimalEmpty;
  DualParams params;
  std::optional<IntVector> primal_point;
  std::optional<IntVector> dual_point;
};

TransferCheck verify_transference(const RationalMatrix& omega, const Rational& A, const Rational& B,
                                  const Rational& C, const EnumConfig& config = EnumConfig());

// Smallest grid value k/denominator with a nonempty dual box, or nullopt when
// the primal box is empty or no grid value up to C_max works.
std::optional<Rational> minimal_transfer_constant(const RationalMatrix& omega, const Rational& A, const Rational& B,
                                                  const Rational& C_max, long denominator,
                                                  const EnumConfig& config = EnumConfig());

struct CalibrationOptions {
  size_t trials = 200;
  long max_den = 50;
  long k_max = 4;  // A ∈ {2^-k : 0 <= k <= k_max}
  long j_max = 4;  // B ∈ {2^j : 0 <= j <= j_max}
  Rational C_max{64};
  long denominator = 16;
  uint64_t seed = 0;
};

struct CalibrationReport {
  long n = 1;
  long m = 1;
  Rational C;  // max over the sweep of the per-case minimal grid value
  size_t matrices = 0;
  size_t cases = 0;
  size_t primal_empty = 0;
  size_t uncalibrated = 0;  // cases with no C up to C_max
  std::string label = "empirical calibration (non-rigorous)";
};

RationalMatrix random_rational_matrix(size_t rows, size_t cols, long max_den, uint64_t seed, uint64_t index);
std::vector<std::pair<Rational, Rational>> calibration_grid(long k_max, long j_max);

CalibrationReport calibrate_transfer_constant(long n, long m, const CalibrationOptions& options,
                                              const EnumConfig& config = EnumConfig());

// Shipped per-(n, m) constants from calibrate_transfer_constant with default
// options and seed 0 (non-rigorous); nullopt for shapes never calibrated.
std::optional<Rational> default_transfer_constant(long n, long m);

struct TransposeRow {
  Rational u;
  bool di_evidence = false;       // M̂_{u, δ u^{-m/n}}(Ω) has a nonzero point
  bool nonsing_evidence = false;  // the same box with κ in place of δ is empty
  std::optional<IntervalReal> normalized;  // u^{m/n} ψ_{Ω^T}(u)
};

struct TransposeReport {
  long n = 1;
  long m = 1;
  IntervalReal delta;  // C^{(m+n)/n} ρ^{m/(n(n+m−1))}
  RootBound delta_root;
  Rational kappa;
  std::vector<TransposeRow> rows;
  std::optional<IntervalReal> normalized_max;
  std::optional<IntervalReal> normalized_min;
  size_t di_count = 0;
  size_t nonsing_count = 0;
  std::string label = "finite-height evidence";
};

IntervalReal transpose_delta(long n, long m, const Rational& C, const Rational& rho, long bits = 96);

// problem is m×n (max norms are used for Ω^T); kappa defaults to ρ.
TransposeReport transpose_folklore_check(const ApproxProblem& problem, const Rational& C, const Rational& rho,
                                         const std::vector<Rational>& heights,
                                         const std::optional<Rational>& kappa = std::nullopt,
                                         const EnumConfig& config = EnumConfig());

}  // namespace dlab
