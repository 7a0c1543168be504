#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dlab/exactnum.hpp"

namespace dlab {

enum class NormKind { Max, P, WeightedMax, Custom };

// Building block for serializable custom norms: outer(|<f_1, x>|, ..., |<f_k, x>|)
// with outer one of max or sum.
struct LinearFunctionalNorm {
  enum class Outer { Max, Sum } outer = Outer::Max;
  std::vector<std::vector<Rational>> functionals;
};

using CustomEvaluator = std::function<IntervalReal(const std::vector<Rational>&, long bits)>;

class NormDescriptor {
 public:
  static NormDescriptor max(size_t dim);
  static NormDescriptor p(size_t dim, const Rational& p);
  static NormDescriptor weighted_max(std::vector<Rational> weights);
  // Validates the declared constants on base vectors, ±1 vertices and seeded
  // samples; throws std::invalid_argument on violation.
  static NormDescriptor custom(size_t dim, CustomEvaluator eval, const Rational& equiv_lo,
                               const Rational& equiv_hi, std::string name);
  static NormDescriptor linear_functionals(size_t dim, LinearFunctionalNorm spec, const Rational& equiv_lo,
                                           const Rational& equiv_hi);

  size_t dimension() const { return dim_; }
  NormKind kind() const { return kind_; }
  const Rational& p_value() const { return p_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& equiv_lo() const { return equiv_lo_; }
  const Rational& equiv_hi() const { return equiv_hi_; }
  const std::string& name() const { return name_; }
  const std::optional<LinearFunctionalNorm>& functional_spec() const { return functional_; }
  bool is_max() const { return kind_ == NormKind::Max; }
  // True when ‖x‖ depends only on |x_i| and is nondecreasing in each.
  bool is_monotone() const { return kind_ != NormKind::Custom; }

  IntervalReal eval(const std::vector<Rational>& v, long bits = 64) const;
  IntervalReal eval(const std::vector<IntervalReal>& v, long bits = 64) const;

 private:
  NormDescriptor() = default;
  IntervalReal eval_point(const std::vector<Rational>& v, long bits) const;

  size_t dim_ = 0;
  NormKind kind_ = NormKind::Max;
  Rational p_{1};
  std::vector<Rational> weights_;
  CustomEvaluator custom_;
  std::optional<LinearFunctionalNorm> functional_;
  Rational equiv_lo_{1};
  Rational equiv_hi_{1};
  std::string name_;

  friend NormDescriptor project_norm(const NormDescriptor&, const std::vector<size_t>&);
};

IntervalReal eval_norm(const NormDescriptor& norm, const std::vector<IntervalReal>& v,
                       const Rational& width = pow2(-64));

// coords are 0-based and must be a nonempty subset of [0, dim).
NormDescriptor project_norm(const NormDescriptor& norm, const std::vector<size_t>& coords);

struct ExpandingReport {
  enum class Verdict { CertifiedOnSamples, CounterexampleFound } verdict = Verdict::CertifiedOnSamples;
  bool closed_form = false;  // Max, P and WeightedMax are expanding by inspection
  size_t samples_checked = 0;
  std::vector<Rational> counterexample;
  size_t coordinate = 0;
};

ExpandingReport is_expanding(const NormDescriptor& norm, size_t samples, uint64_t seed = 0);

struct NormConstants {
  IntervalReal d1;
  IntervalReal d2;
  IntervalReal gamma_allones;
  IntervalReal gamma_e1_projected;
};

// d1, d2 from norm_a (dimension >= 2, or d2 = d1 in dimension 1); Γ is the
// max over ±1 sign patterns of norm_b; γ is ‖e₁‖ of norm_a projected to its
// first coordinate.
NormConstants norm_constants(const NormDescriptor& norm_a, const NormDescriptor& norm_b);

// Max over all ±1 vertex vectors (dimension <= 16).
IntervalReal max_over_vertices(const NormDescriptor& norm, long bits = 64);

std::string describe(const NormDescriptor& norm);

}  // namespace dlab
