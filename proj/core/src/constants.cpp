#include "dlab/constants.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "dlab/bestapprox.hpp"
#include "dlab/prng.hpp"
#include "dlab/real.hpp"

namespace dlab {

namespace {

// n = s^2 · f with f squarefree.
std::pair<Integer, Integer> split_square(Integer n) {
  if (n <= 0) throw std::invalid_argument("square root of non-positive integer");
  Integer s(1), f(1);
  for (Integer p(2); p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      s *= p;
    }
    if (n % p == 0) {
      n /= p;
      f *= p;
    }
  }
  return {s, f * n};
}

IntervalReal pi_half_power(long half, long prec) {
  if (half == 0) return IntervalReal(1);
  return pow_enclosure(pi_enclosure(prec), ratio(half, 2), prec);
}

bool effectively_abs(const NormDescriptor& nd) {
  if (nd.is_max()) return true;
  if (nd.dimension() != 1) return false;
  if (nd.kind() == NormKind::P) return true;
  if (nd.kind() == NormKind::WeightedMax) return nd.weights()[0] == 1;
  return false;
}

}  // namespace

PiSurd PiSurd::rational(const Rational& q) { return PiSurd{q, 0, Integer(1)}; }
PiSurd PiSurd::sqrt_pi() { return PiSurd{Rational(1), 1, Integer(1)}; }

PiSurd PiSurd::sqrt_of(const Integer& n) {
  auto [s, f] = split_square(n);
  return PiSurd{Rational(s), 0, f};
}

PiSurd PiSurd::operator*(const PiSurd& o) const {
  if (coeff == 0 || o.coeff == 0) return rational(0);
  Integer g;
  mpz_gcd(g.get_mpz_t(), surd.get_mpz_t(), o.surd.get_mpz_t());
  Integer a = surd / g, b = o.surd / g;
  return PiSurd{coeff * o.coeff * Rational(g), half_pi_power + o.half_pi_power, a * b};
}

PiSurd PiSurd::inverse() const {
  if (coeff == 0) throw std::domain_error("inverse of zero");
  Rational c = 1 / (coeff * Rational(surd));
  return PiSurd{c, -half_pi_power, surd};
}

PiSurd PiSurd::operator/(const PiSurd& o) const { return *this * o.inverse(); }

bool PiSurd::operator==(const PiSurd& o) const {
  if (coeff == 0 || o.coeff == 0) return coeff == o.coeff;
  return coeff == o.coeff && half_pi_power == o.half_pi_power && surd == o.surd;
}

IntervalReal PiSurd::enclose(long bits) const {
  if (coeff == 0) return IntervalReal(0);
  Rational target = pow2(-bits);
  long prec = bits + 32 + static_cast<long>(bit_length(coeff.get_num())) + 2 * std::abs(half_pi_power);
  for (;;) {
    IntervalReal r = IntervalReal(coeff) * pi_half_power(half_pi_power, prec);
    if (surd != 1) r *= sqrt_enclosure(IntervalReal(Rational(surd)), prec);
    if (r.width() <= target) return r.round_out(bits + 2);
    prec *= 2;
  }
}

std::string PiSurd::str() const {
  std::ostringstream os;
  os << to_string(coeff);
  if (coeff == 0) return os.str();
  if (half_pi_power != 0) {
    if (half_pi_power % 2 == 0) {
      os << "*pi^" << half_pi_power / 2;
    } else {
      os << "*pi^(" << half_pi_power << "/2)";
    }
  }
  if (surd != 1) os << "*sqrt(" << to_string(surd) << ")";
  return os.str();
}

Integer double_factorial_odd(long k) {
  if (k < 0) throw std::invalid_argument("double factorial index must be >= 0");
  Integer r(1);
  for (long i = 1; i <= 2 * k - 1; i += 2) r *= i;
  return r;
}

PiSurd gamma_half(long k) {
  if (k < 1) throw std::invalid_argument("gamma_half needs k >= 1");
  if (k % 2 == 0) {
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k / 2 - 1));
    return PiSurd::rational(Rational(f));
  }
  long j = (k - 1) / 2;  // Γ(j + 1/2) = (2j-1)!! √π / 2^j
  return PiSurd{Rational(double_factorial_odd(j)) / pow2(j) * Rational(1), 1, Integer(1)};
}

SymbolicValue ball_volume(long k) {
  if (k < 0) throw std::invalid_argument("ball dimension must be >= 0");
  PiSurd v = PiSurd{Rational(1), k, Integer(1)} / gamma_half(k + 2);
  return SymbolicValue{v, v.enclose(128)};
}

SymbolicValue cn_threshold(long n) {
  if (n < 4) throw std::invalid_argument("c_n is defined for n >= 4");
  PiSurd v = PiSurd::rational(ratio(n - 3, 8 * (n - 2))) / PiSurd::sqrt_of(Integer(n - 2)) * PiSurd::sqrt_pi() *
             gamma_half(2 * n - 1) / gamma_half(2 * n);
  return SymbolicValue{v, v.enclose(128)};
}

SymbolicValue cn_ball_form(long n) {
  if (n < 4) throw std::invalid_argument("c_n is defined for n >= 4");
  PiSurd v = PiSurd::rational(ratio(n - 3, 4 * (2 * n - 4))) / PiSurd::sqrt_of(Integer(n - 2)) *
             ball_volume(n - 2).exact / ball_volume(n - 3).exact;
  return SymbolicValue{v, v.enclose(128)};
}

IntervalReal covering_bound(long n, const Rational& eps, const Rational& eps2, const IntervalReal& L_v,
                            const IntervalReal& T_v, const Rational& norm_factor, long bits) {
  if (n < 4) throw std::invalid_argument("covering bound needs n >= 4");
  if (eps < 0 || eps2 < 0 || norm_factor <= 0) throw std::invalid_argument("covering bound parameters");
  long prec = bits + 32;
  IntervalReal root = sqrt_enclosure(IntervalReal(Rational(n - 2)), prec);
  IntervalReal r = IntervalReal(Rational(2 * (2 * n - 4))) * (IntervalReal(2) * root + IntervalReal(2 * eps)) *
                   ball_volume(n - 3).exact.enclose(prec) * IntervalReal(Rational(1, n - 3) + eps2) * L_v *
                   T_v.pow(static_cast<unsigned long>(n)) * IntervalReal(norm_factor);
  return r;
}

PiSurd covering_bound_exact(long n, const PiSurd& lt_power) {
  if (n < 4) throw std::invalid_argument("covering bound needs n >= 4");
  return PiSurd::rational(ratio(4 * (2 * n - 4), n - 3)) * PiSurd::sqrt_of(Integer(n - 2)) *
         ball_volume(n - 3).exact * lt_power;
}

DirichletConstant dirichlet_D(const NormDescriptor& norm1, const NormDescriptor& norm2, size_t sweep_matrices,
                              long height, uint64_t seed) {
  DirichletConstant out;
  if (effectively_abs(norm1) && effectively_abs(norm2)) {
    out.kind = DirichletConstant::Kind::Exact;
    out.value = IntervalReal(1);
    out.label = "exact: maximum norms";
    return out;
  }
  const size_t n = norm1.dimension(), m = norm2.dimension();
  const Rational e = ratio(static_cast<long>(n), static_cast<long>(m));
  CounterRng rng(seed, 0xD);
  uint64_t counter = 0;
  EnumConfig cfg;
  cfg.threads = 1;
  IntervalReal observed(0);
  for (size_t k = 0; k < sweep_matrices; ++k) {
    RealMatrix omega(m, std::vector<ExactReal>(n));
    for (auto& row : omega) {
      for (auto& x : row) {
        long den = 1000003;
        long num = static_cast<long>(rng.uniform(static_cast<uint64_t>(den), counter));
        x = ExactReal(ratio(num, den));
      }
    }
    ApproxProblem pb(omega, norm1, norm2);
    auto records = best_approx_sequence(pb, Rational(height), cfg);
    for (long t = 1; t <= height; ++t) {
      auto q = psi_from_records(records, Rational(t));
      if (!q) continue;
      IntervalReal val = pow_enclosure(IntervalReal(Rational(t)), e, 96) * *q;
      observed = imax(observed, IntervalReal(val.lo()));
    }
  }
  IntervalReal upper = IntervalReal(norm2.equiv_hi()) * pow_enclosure(IntervalReal(norm1.equiv_hi()), e, 96);
  out.kind = DirichletConstant::Kind::EmpiricalUpper;
  out.value = IntervalReal(observed.lo(), std::max(observed.lo(), upper.hi()));
  out.label = "empirical (non-rigorous): observed sup of t^{n/m} psi over a random sweep, norm-equivalence upper bound";
  out.matrices = sweep_matrices;
  return out;
}

}  // namespace dlab
