#pragma once

#include <string>

#include "dlab/exactnum.hpp"
#include "dlab/normspace.hpp"

namespace dlab {

// coeff · π^(half_pi_power/2) · √surd with surd squarefree.
struct PiSurd {
  Rational coeff{0};
  long half_pi_power = 0;
  Integer surd{1};

  static PiSurd rational(const Rational& q);
  static PiSurd sqrt_pi();
  static PiSurd sqrt_of(const Integer& n);

  PiSurd operator*(const PiSurd& o) const;
  PiSurd operator/(const PiSurd& o) const;
  PiSurd inverse() const;
  bool operator==(const PiSurd& o) const;
  bool operator!=(const PiSurd& o) const { return !(*this == o); }

  IntervalReal enclose(long bits) const;
  std::string str() const;
};

// Γ(k/2) for k >= 1.
PiSurd gamma_half(long k);
// (2k-1)!! with (-1)!! = 1.
Integer double_factorial_odd(long k);

struct SymbolicValue {
  PiSurd exact;
  IntervalReal decimal;
};

SymbolicValue ball_volume(long k);
// (n-3)/(8(n-2)^{3/2}) · √π · Γ(n-1/2)/Γ(n).
SymbolicValue cn_threshold(long n);
// (n-3)/(4(2n-4)√(n-2)) · λ(B_{n-2})/λ(B_{n-3}).
SymbolicValue cn_ball_form(long n);

// 2(2n-4)(2√(n-2)+2ε)·λ(B_{n-3})·(1/(n-3)+ε₂)·L_v·T_v^n·norm_factor.
IntervalReal covering_bound(long n, const Rational& eps, const Rational& eps2, const IntervalReal& L_v,
                            const IntervalReal& T_v, const Rational& norm_factor = 1, long bits = 128);
// Symbolic form at ε = ε₂ = 0 with L_v·T_v^n given symbolically.
PiSurd covering_bound_exact(long n, const PiSurd& lt_power);

struct DirichletConstant {
  enum class Kind { Exact, EmpiricalUpper } kind = Kind::Exact;
  // Exact: a point. EmpiricalUpper: [largest observed t^{n/m}ψ(t), norm-equivalence upper bound].
  IntervalReal value;
  std::string label;
  size_t matrices = 0;
};

DirichletConstant dirichlet_D(const NormDescriptor& norm1, const NormDescriptor& norm2, size_t sweep_matrices = 12,
                              long height = 60, uint64_t seed = 0);

}  // namespace dlab
