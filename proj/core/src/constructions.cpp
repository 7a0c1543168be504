#include "dlab/constructions.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/prng.hpp"
#include "dlab/real.hpp"

namespace dlab {

namespace {

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

IntervalReal log_int(long p, long bits) { return log_rational(Rational(p), bits); }

// Best pair with k1 <= k1_max, k2 <= k2_max; empty when none is within eps.
std::optional<KroneckerPair> kronecker_search(const IntervalReal& a, const IntervalReal& b, const IntervalReal& target,
                                              const Rational& eps, long k1_max, long k2_max) {
  if (a.lo() <= 0 || b.lo() <= 0) throw std::invalid_argument("kronecker_step needs positive logs");
  if (eps <= 0) throw std::invalid_argument("kronecker_step needs eps > 0");
  std::optional<KroneckerPair> best;
  Rational best_mid;
  for (long k2 = 0; k2 <= k2_max; ++k2) {
    IntervalReal rest = target - IntervalReal(Rational(k2)) * b;
    if (rest.hi() + eps < 0) break;
    Integer c = floor_q(rest.midpoint() / a.midpoint());
    for (long d = -1; d <= 2; ++d) {
      Integer k1z = c + d;
      if (k1z < 0 || k1z > k1_max) continue;
      long k1 = k1z.get_si();
      IntervalReal err = (IntervalReal(Rational(k1)) * a + IntervalReal(Rational(k2)) * b - target).abs();
      if (!(err.hi() < eps)) continue;
      Rational mid = err.midpoint();
      if (!best || mid < best_mid || (mid == best_mid && k1 < best->k1)) {
        best = KroneckerPair{k1, k2, err};
        best_mid = mid;
      }
    }
  }
  return best;
}

long working_bits(const IntervalReal& magnitude) {
  return 96 + static_cast<long>(bit_length(ceil_q(magnitude.mag()) + 1));
}

Rational default_tau(const Rational& e) { return e + Rational(1) / (2 * (e + 1) * (e + 1)); }

IntVector vec3(const Integer& x, const Integer& y, const Integer& z) { return IntVector{x, y, z}; }

IntVector add(const IntVector& a, const IntVector& b, int sign) {
  IntVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + sign * b[i];
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

TwoScaleVector build_two_scale(const TwoScaleParams& p) {
  if (p.n < 2) throw std::invalid_argument("two-scale construction needs n >= 2");
  if (p.c <= 0 || p.c > 1) throw std::invalid_argument("two-scale construction needs c in (0, 1]");
  if (p.a1 < 2 || p.a2 < 2) throw std::invalid_argument("seeds must be >= 2");
  if (p.a2 % p.a1 != 0) throw std::invalid_argument("seeds must satisfy a1 | a2");
  if (p.levels < 2) throw std::invalid_argument("at least two levels");

  TwoScaleVector out;
  TwoScaleState& s = out.state;
  s.params = p;
  s.a = {p.a1, p.a2};
  Rational cinv = 1 / p.c;
  for (size_t j = 3; j <= p.levels; ++j) {
    const Integer& prev = s.a.back();
    if (j % 2 == 1) {
      size_t k = (j - 1) / 2;
      long Mk = k <= p.M.size() ? p.M[k - 1] : static_cast<long>(k) + 2;
      if (Mk < 2) throw std::invalid_argument("M_k must be >= 2");
      if (!s.M.empty() && Mk <= s.M.back()) throw std::invalid_argument("M_k must be strictly increasing");
      if (bit_length(prev) * static_cast<size_t>(Mk) > p.max_bits) {
        throw BudgetExceeded("two-scale level a_" + std::to_string(j) + " exceeds the bit cap");
      }
      s.M.push_back(Mk);
      if (Mk <= p.n) {
        s.warnings.push_back("M_" + std::to_string(k) + " = " + std::to_string(Mk) + " <= n: level a_" +
                             std::to_string(j) + " is outside the asymptotic regime");
      }
      s.a.push_back(ipow(prev, static_cast<unsigned long>(Mk)));
    } else {
      if (bit_length(prev) * static_cast<size_t>(p.n) > p.max_bits) {
        throw BudgetExceeded("two-scale level a_" + std::to_string(j) + " exceeds the bit cap");
      }
      Integer pn1 = ipow(prev, static_cast<unsigned long>(p.n - 1));
      Integer factor = ceil_q(cinv * Rational(pn1));
      Integer next = prev * factor;
      if (next == prev * pn1) {
        s.degenerate = true;
        s.warnings.push_back("a_" + std::to_string(j) + " = a_" + std::to_string(j - 1) +
                             "^n exactly: strict growth fails (degenerate)");
      }
      s.a.push_back(std::move(next));
    }
  }
  std::vector<Integer> odd, even;
  for (size_t i = 0; i < s.a.size(); ++i) (i % 2 == 0 ? odd : even).push_back(s.a[i]);
  // a_{levels+1} >= a_levels^e with e = M_k or n; capped to stay within max_bits.
  const size_t j = p.levels + 1;
  long e = p.n;
  if (j % 2 == 1) {
    size_t k = (j - 1) / 2;
    e = k <= p.M.size() ? p.M[k - 1] : static_cast<long>(k) + 2;
  }
  const long room = static_cast<long>(p.max_bits / std::max<size_t>(1, bit_length(s.a.back())));
  Integer next_lb = ipow(s.a.back(), static_cast<unsigned long>(std::max(2L, std::min(e, room))));
  out.xi1 = reciprocal_series(odd, {}, next_lb, "two-scale xi_1");
  out.xi2 = reciprocal_series(even, {}, next_lb, "two-scale xi_2");
  return out;
}

void verify_two_scale(const TwoScaleState& s) {
  const auto& a = s.a;
  if (a.size() < 2 || a[1] % a[0] != 0) throw InvariantViolation("a_1 does not divide a_2");
  Rational cinv = 1 / s.params.c;
  for (size_t j = 3; j <= a.size(); ++j) {
    const Integer& prev = a[j - 2];
    const Integer& cur = a[j - 1];
    if (j % 2 == 1) {
      size_t k = (j - 1) / 2;
      if (cur != ipow(prev, static_cast<unsigned long>(s.M[k - 1]))) {
        throw InvariantViolation("a_" + std::to_string(j) + " != a_" + std::to_string(j - 1) + "^M_k");
      }
    } else {
      Integer pn1 = ipow(prev, static_cast<unsigned long>(s.params.n - 1));
      if (cur != prev * ceil_q(cinv * Rational(pn1))) {
        throw InvariantViolation("a_" + std::to_string(j) + " breaks the second recursion");
      }
      if (cur < prev * pn1 || (cur == prev * pn1 && !s.degenerate)) {
        throw InvariantViolation("a_" + std::to_string(j) + " is not above a_" + std::to_string(j - 1) + "^n");
      }
    }
  }
}

namespace {

Integer mod_pos(const Integer& a, const Integer& n) {
  Integer r = a % n;
  if (r < 0) r += n;
  return r;
}

// Points of {(x, y) : x·t1 + y·t2 ∈ Z} with small |w|, w the coordinate at
// index `dominant`: w = w0·q for the continued-fraction convergent
// denominators q of s/N, the other coordinate the two representatives of
// q·s mod N closest to 0. Also the axis point (w = 0).
void congruence_candidates(const Rational& t1, const Rational& t2, size_t dominant, std::vector<IntVector>& out) {
  Integer N;
  mpz_lcm(N.get_mpz_t(), t1.get_den_mpz_t(), t2.get_den_mpz_t());
  Integer c[2] = {t1.get_num() * (N / t1.get_den()), t2.get_num() * (N / t2.get_den())};
  const Integer& cw = c[dominant];
  const Integer& co = c[1 - dominant];
  Integer g, h, inv;
  mpz_gcd(g.get_mpz_t(), co.get_mpz_t(), N.get_mpz_t());
  mpz_gcd(h.get_mpz_t(), cw.get_mpz_t(), g.get_mpz_t());
  const Integer w0 = g / h;
  const Integer Np = N / g;
  auto emit = [&](const Integer& w, const Integer& o) {
    IntVector v(2);
    v[dominant] = w;
    v[1 - dominant] = o;
    if (w != 0 || o != 0) out.push_back(std::move(v));
  };
  emit(Integer(0), Np);
  if (Np == 1) {
    emit(w0, Integer(0));
    return;
  }
  Integer cop = mod_pos(co / g, Np);
  if (mpz_invert(inv.get_mpz_t(), cop.get_mpz_t(), Np.get_mpz_t()) == 0) return;
  const Integer s = mod_pos(-(cw * w0 / g) * inv, Np);
  auto emit_q = [&](const Integer& q) {
    Integer r = mod_pos(q * s, Np);
    emit(w0 * q, r);
    emit(w0 * q, r - Np);
  };
  // Convergent denominators of s/Np, with the neighbours q_{i-1} + q_i.
  Integer num = s, den = Np, q_prev(0), q_cur(1);
  emit_q(q_cur);
  while (num != 0) {
    Integer a = den / num;
    Integer r = den % num;
    den = num;
    num = r;
    Integer q_next = a * q_cur + q_prev;
    emit_q(q_next);
    emit_q(q_next + q_cur);
    q_prev = q_cur;
    q_cur = q_next;
  }
}

}  // namespace

std::vector<IntVector> structural_candidates(const TwoScaleState& s) {
  const auto& a = s.a;
  auto at = [&](size_t i) -> Integer { return i == 0 ? Integer(1) : a[i - 1]; };  // a_0 = 1
  std::vector<IntVector> base;
  for (size_t i = 1; i <= a.size(); ++i) {
    base.push_back(i % 2 == 1 ? IntVector{a[i - 1], 0} : IntVector{0, a[i - 1]});
  }
  for (size_t k = 1; 2 * k + 1 <= a.size(); ++k) {
    Integer ratio = at(2 * k + 1) / at(2 * k);
    base.push_back(IntVector{-at(2 * k - 2) * ratio, at(2 * k - 2)});
  }
  std::vector<IntVector> out = base;
  for (size_t i = 0; i < base.size(); ++i) {
    for (size_t j = i + 1; j < base.size(); ++j) {
      out.push_back(add(base[i], base[j], 1));
      out.push_back(add(base[i], base[j], -1));
    }
  }
  Rational t[2] = {0, 0};
  for (size_t l = 1; l < a.size(); ++l) {
    t[(l - 1) % 2] += Rational(1) / Rational(a[l - 1]);
    congruence_candidates(t[0], t[1], l % 2, out);
  }
  return out;
}

// ---------------------------------------------------------------------------

KroneckerPair kronecker_step(const IntervalReal& log_a, const IntervalReal& log_b, const IntervalReal& target,
                             const Rational& eps, long bound) {
  if (bound < 0) throw std::invalid_argument("bound must be >= 0");
  auto best = kronecker_search(log_a, log_b, target, eps, bound, bound);
  if (!best) throw NoPairWithinBound("no pair within bound " + std::to_string(bound));
  return *best;
}

Rational PrimePowerState::eps(size_t j) const { return params.eps0 * pow2(-static_cast<long>(j)); }

IntVector PrimePowerState::v(size_t j) const { return vec3(A.at(j - 1), 0, -F.at(j - 1)); }
IntVector PrimePowerState::w(size_t j) const { return vec3(0, B.at(j - 1), -G.at(j - 1)); }

IntervalReal PrimePowerState::log_A(size_t j, long bits) const {
  long extra = static_cast<long>(bit_length(Integer(alpha.at(j - 1)) + gamma.at(j - 1))) + 4;
  return IntervalReal(Rational(alpha[j - 1])) * log_int(2, bits + extra) +
         IntervalReal(Rational(gamma[j - 1])) * log_int(3, bits + extra);
}

IntervalReal PrimePowerState::log_B(size_t j, long bits) const {
  long extra = static_cast<long>(bit_length(Integer(beta.at(j - 1)) + delta.at(j - 1))) + 4;
  return IntervalReal(Rational(beta[j - 1])) * log_int(5, bits + extra) +
         IntervalReal(Rational(delta[j - 1])) * log_int(7, bits + extra);
}

PrimePowerVector build_prime_power(const PrimePowerParams& p) {
  if (p.exponent <= 0) throw std::invalid_argument("exponent must be positive");
  if (p.c <= 0) throw std::invalid_argument("c must be positive");
  if (p.levels < 1) throw std::invalid_argument("at least one level");
  PrimePowerVector out;
  PrimePowerState& s = out.state;
  s.params = p;
  s.tau = p.tau ? *p.tau : default_tau(p.exponent);
  if (s.tau <= p.exponent) throw std::invalid_argument("tau must exceed the exponent");
  s.mu = 1 / (s.tau - p.exponent);
  if (s.mu <= s.tau * s.tau) throw std::invalid_argument("infeasible (tau, mu): mu must exceed tau^2");
  if (p.norm1 && p.norm1->dimension() != 2) throw DimensionMismatch("norm1 must live on R^2");
  s.d2 = p.norm1 ? p.norm1->eval(std::vector<Rational>{0, 1}, 128) : IntervalReal(1);
  const long base_bits = 128;
  IntervalReal log_r = -log_rational(p.c, base_bits);
  if (!(p.gamma.is_point() && p.gamma.lo() == 1)) log_r -= log_enclosure(p.gamma, base_bits);
  if (!(s.d2.is_point() && s.d2.lo() == 1)) log_r += IntervalReal(p.exponent) * log_enclosure(s.d2, base_bits);
  s.log_r = log_r;

  const long k2_window = 4096;
  auto check_bits = [&](const IntervalReal& log_value, const std::string& what) {
    // bits ≈ log / log 2 < 1.5 · log
    if (log_value.hi() * Rational(3, 2) > Rational(static_cast<long>(p.max_bits))) {
      throw BudgetExceeded(what + " exceeds the bit cap of " + std::to_string(p.max_bits));
    }
  };

  s.alpha.push_back(1);
  s.gamma.push_back(1);
  for (size_t j = 1; j <= p.levels; ++j) {
    if (j > 1) {
      IntervalReal goal = s.log_r + IntervalReal(s.tau) * s.log_B(j - 1);
      check_bits(goal, "A_" + std::to_string(j));
      long bits = working_bits(goal);
      IntervalReal l2 = log_int(2, bits), l3 = log_int(3, bits);
      IntervalReal T = s.log_r + IntervalReal(s.tau) * s.log_B(j - 1, bits) - s.log_A(j - 1, bits) - l2 - l3;
      auto pair = kronecker_search(l2, l3, T, s.eps(j - 1) / 2, std::numeric_limits<long>::max() / 4, k2_window);
      if (!pair) throw NoPairWithinBound("exponent search for A_" + std::to_string(j) + " failed");
      s.alpha.push_back(s.alpha.back() + pair->k1 + 1);
      s.gamma.push_back(s.gamma.back() + pair->k2 + 1);
    }
    {
      IntervalReal goal = IntervalReal(s.mu) * s.log_A(j);
      check_bits(goal, "B_" + std::to_string(j));
      long bits = working_bits(goal);
      IntervalReal l5 = log_int(5, bits), l7 = log_int(7, bits);
      IntervalReal T = IntervalReal(s.mu) * s.log_A(j, bits) - l5 - l7;
      if (j > 1) T -= s.log_B(j - 1, bits);
      auto pair = kronecker_search(l5, l7, T, s.eps(j) / 2, std::numeric_limits<long>::max() / 4, k2_window);
      if (!pair) throw NoPairWithinBound("exponent search for B_" + std::to_string(j) + " failed");
      s.beta.push_back((j > 1 ? s.beta.back() : 0) + pair->k1 + 1);
      s.delta.push_back((j > 1 ? s.delta.back() : 0) + pair->k2 + 1);
    }
  }
  for (size_t j = 1; j <= p.levels; ++j) {
    s.A.push_back(ipow(2, s.alpha[j - 1]) * ipow(3, s.gamma[j - 1]));
    s.B.push_back(ipow(5, s.beta[j - 1]) * ipow(7, s.delta[j - 1]));
    if (j == 1) {
      s.F.push_back(1);
      s.G.push_back(1);
    } else {
      s.F.push_back(s.F.back() * (s.A[j - 1] / s.A[j - 2]) + 1);
      s.G.push_back(s.G.back() * (s.B[j - 1] / s.B[j - 2]) + 1);
    }
  }
  auto ver = verify_prime_power(s);
  for (const auto& f : ver.failures) s.warnings.push_back(f);
  out.xi1 = reciprocal_series(s.A, {}, s.B.back(), "prime-power xi_1");
  out.xi2 = reciprocal_series(s.B, {}, s.B.back() * s.B.back(), "prime-power xi_2");
  return out;
}

PrimePowerVerification verify_prime_power(const PrimePowerState& s) {
  PrimePowerVerification out;
  const size_t J = s.levels();
  auto fail = [&](size_t j, const std::string& what) {
    out.failures.push_back("level " + std::to_string(j) + ": " + what);
  };
  for (size_t j = 1; j <= J; ++j) {
    LevelCheck lc;
    lc.j = j;
    const Integer &A = s.A[j - 1], &B = s.B[j - 1], &F = s.F[j - 1], &G = s.G[j - 1];
    Integer f6, g35;
    mpz_fdiv_r_ui(f6.get_mpz_t(), F.get_mpz_t(), 6);
    mpz_fdiv_r_ui(g35.get_mpz_t(), G.get_mpz_t(), 35);
    lc.congruences = f6 == 1 && g35 == 1;
    if (!lc.congruences) fail(j, "F_j mod 6 or G_j mod 35 is not 1");

    Integer g1, g2, g3, g4;
    mpz_gcd(g1.get_mpz_t(), A.get_mpz_t(), F.get_mpz_t());
    mpz_gcd_ui(g2.get_mpz_t(), F.get_mpz_t(), 6);
    mpz_gcd(g3.get_mpz_t(), B.get_mpz_t(), G.get_mpz_t());
    mpz_gcd_ui(g4.get_mpz_t(), G.get_mpz_t(), 35);
    lc.gcds = g1 == 1 && g2 == 1 && g3 == 1 && g4 == 1;
    if (!lc.gcds) fail(j, "coprimality");

    bool increasing = j == 1 || (s.alpha[j - 1] > s.alpha[j - 2] && s.gamma[j - 1] > s.gamma[j - 2] &&
                                 s.beta[j - 1] > s.beta[j - 2] && s.delta[j - 1] > s.delta[j - 2]);
    lc.interleaving = increasing && (j == 1 ? A > 1 : s.B[j - 2] < A) && A < B;
    if (!lc.interleaving) fail(j, "interleaving or exponent monotonicity");

    const long bits = 128;
    Rational eps = s.eps(j);
    IntervalReal e1 = (s.log_B(j, bits) - IntervalReal(s.mu) * s.log_A(j, bits)).abs();
    lc.accto = e1.hi() <= eps;
    if (j < J) {
      IntervalReal e2 = (s.log_A(j + 1, bits) - s.log_r - IntervalReal(s.tau) * s.log_B(j, bits)).abs();
      lc.accto = lc.accto && e2.hi() <= eps;
    }
    if (!lc.accto) fail(j, "log-ratio tolerance");

    auto divisors = elementary_divisors(IntMatrix{s.v(j), s.w(j)});
    lc.saturation = divisors == std::vector<Integer>{1, 1};
    if (!lc.saturation) fail(j, "elementary divisors are not (1, 1)");

    if (j < J) {
      // |v_j·ξ*|·‖ŵ_j‖^e = (A_j/A_{j+1})(1 + ρ)(d₂ B_j)^e, 0 <= ρ <= 2 A_{j+1}/A_{j+2}.
      const Rational& e = s.params.exponent;
      IntervalReal L = s.log_A(j, bits) - s.log_A(j + 1, bits) + IntervalReal(e) * s.log_B(j, bits);
      if (!(s.d2.is_point() && s.d2.lo() == 1)) L += IntervalReal(e) * log_enclosure(s.d2, bits);
      IntervalReal log_next = j + 2 <= J ? s.log_A(j + 2, bits) : s.log_B(j + 1, bits);
      IntervalReal log_rho = IntervalReal(log_rational(Rational(2), bits)) + s.log_A(j + 1, bits) - log_next;
      Rational rho = log_rho.hi() < -256 ? pow2(-256) : exp_enclosure(log_rho, bits).hi();
      IntervalReal value = exp_enclosure(L, bits) * IntervalReal(Rational(1), 1 + rho);
      lc.calibration_value = value;
      const Rational& c = s.params.c;
      lc.calibration = value.lo() >= c * (1 - eps) && value.hi() <= c * (1 + eps);
      if (!*lc.calibration) fail(j, "calibration product outside c(1 +- eps_j)");
    }
    out.levels.push_back(std::move(lc));
  }
  return out;
}

std::vector<NamedForm> six_forms(const PrimePowerState& s) {
  std::vector<NamedForm> out;
  const size_t J = s.levels();
  for (size_t j = 1; j <= J; ++j) {
    std::string js = std::to_string(j), jn = std::to_string(j + 1);
    IntVector v = s.v(j), w = s.w(j);
    out.push_back({"v_" + js, j, v});
    out.push_back({"w_" + js, j, w});
    out.push_back({"v_" + js + "+w_" + js, j, add(v, w, 1)});
    out.push_back({"w_" + js + "-v_" + js, j, add(w, v, -1)});
    if (j < J) {
      IntVector vn = s.v(j + 1);
      out.push_back({"w_" + js + "+v_" + jn, j, add(w, vn, 1)});
      out.push_back({"v_" + jn + "-w_" + js, j, add(vn, w, -1)});
    }
  }
  return out;
}

std::vector<IntVector> structural_candidates(const PrimePowerState& s) {
  std::vector<IntVector> out;
  for (const auto& f : six_forms(s)) out.push_back(IntVector{f.b[0], f.b[1]});
  return out;
}

// ---------------------------------------------------------------------------

SignVariedMatrix build_sign_varied(
    const PrimePowerParams& params, size_t m, uint64_t seed, const std::optional<NormDescriptor>& norm2,
    const std::optional<std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>>>& explicit_signs) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (norm2 && norm2->dimension() != m) throw DimensionMismatch("norm2 must live on R^m");
  const size_t L = params.levels;
  SignVariedMatrix out;
  SignVariedState& s = out.state;
  s.m = m;
  s.seed = seed;
  if (explicit_signs) {
    s.delta = explicit_signs->first;
    s.delta_star = explicit_signs->second;
    if (s.delta.size() != m || s.delta_star.size() != m) throw DimensionMismatch("sign rows must equal m");
    for (size_t k = 0; k < m; ++k) {
      if (s.delta[k].size() < L || s.delta_star[k].size() < L) throw DimensionMismatch("sign rows too short");
      s.delta[k].resize(L);
      s.delta_star[k].resize(L);
      for (int x : s.delta[k]) {
        if (x != 1 && x != -1) throw std::invalid_argument("signs must be +-1");
      }
      for (int x : s.delta_star[k]) {
        if (x != 1 && x != -1) throw std::invalid_argument("signs must be +-1");
      }
    }
  } else {
    s.delta.assign(m, std::vector<int>(L));
    s.delta_star.assign(m, std::vector<int>(L));
    for (size_t k = 0; k < m; ++k) {
      CounterRng r1(seed, 2 * k), r2(seed, 2 * k + 1);
      for (size_t j = 0; j < L; ++j) {
        s.delta[k][j] = (r1.at(j + 1) & 1) ? 1 : -1;
        s.delta_star[k][j] = (r2.at(j + 1) & 1) ? 1 : -1;
      }
    }
  }
  std::set<std::vector<int>> pats;
  for (size_t j = 0; j < L; ++j) {
    std::vector<int> p1(m), p2(m);
    for (size_t k = 0; k < m; ++k) {
      p1[k] = s.delta[k][j];
      p2[k] = s.delta_star[k][j];
    }
    pats.insert(p1);
    pats.insert(p2);
  }
  s.patterns.assign(pats.begin(), pats.end());
  NormDescriptor nb = norm2 ? *norm2 : NormDescriptor::max(m);
  s.gamma = IntervalReal(0);
  for (const auto& pat : s.patterns) {
    std::vector<Rational> v(pat.begin(), pat.end());
    s.gamma = imax(s.gamma, nb.eval(v, 128));
  }
  PrimePowerParams base = params;
  base.gamma = s.gamma;
  s.base = build_prime_power(base).state;
  const auto& A = s.base.A;
  const auto& B = s.base.B;
  s.F.assign(m, {});
  s.G.assign(m, {});
  out.V.assign(m, std::vector<ExactReal>(2));
  for (size_t k = 0; k < m; ++k) {
    for (size_t j = 0; j < L; ++j) {
      if (j == 0) {
        s.F[k].push_back(Integer(s.delta[k][0]));
        s.G[k].push_back(Integer(s.delta_star[k][0]));
      } else {
        s.F[k].push_back(s.F[k].back() * (A[j] / A[j - 1]) + s.delta[k][j]);
        s.G[k].push_back(s.G[k].back() * (B[j] / B[j - 1]) + s.delta_star[k][j]);
      }
    }
    out.V[k][0] = reciprocal_series(A, s.delta[k], B.back(), "sign-varied row " + std::to_string(k + 1) + " col 1");
    out.V[k][1] = reciprocal_series(B, s.delta_star[k], B.back() * B.back(),
                                    "sign-varied row " + std::to_string(k + 1) + " col 2");
  }
  verify_sign_varied(s);
  return out;
}

void verify_sign_varied(const SignVariedState& s) {
  for (size_t k = 0; k < s.m; ++k) {
    for (size_t j = 0; j < s.F[k].size(); ++j) {
      Integer f, g;
      mpz_fdiv_r_ui(f.get_mpz_t(), s.F[k][j].get_mpz_t(), 6);
      mpz_fdiv_r_ui(g.get_mpz_t(), s.G[k][j].get_mpz_t(), 35);
      if (!(f == 1 || f == 5) || !(g == 1 || g == 34)) {
        throw InvariantViolation("sign-varied congruence fails at row " + std::to_string(k + 1) + ", level " +
                                 std::to_string(j + 1));
      }
    }
  }
}

// ---------------------------------------------------------------------------

RealMatrix row_matrix(const std::vector<ExactReal>& xi) { return RealMatrix{xi}; }

RealMatrix rational_matrix(const std::vector<std::vector<Rational>>& q) {
  RealMatrix out;
  for (const auto& row : q) out.emplace_back(row.begin(), row.end());
  return out;
}

MatrixBuild repeated_row(const std::vector<ExactReal>& xi, size_t m) {
  if (xi.empty() || m == 0) throw DimensionMismatch("repeated row needs a nonempty row and m >= 1");
  return MatrixBuild{MatrixBuild::Kind::RepeatedRowV, RealMatrix(m, xi),
                     "repeated-row m=" + std::to_string(m)};
}

MatrixBuild block_diagonal(const std::vector<RealMatrix>& blocks) {
  size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    if (b.empty() || b.front().empty()) throw DimensionMismatch("empty block");
    for (const auto& r : b) {
      if (r.size() != b.front().size()) throw DimensionMismatch("ragged block");
    }
    rows += b.size();
    cols += b.front().size();
  }
  if (blocks.empty()) throw DimensionMismatch("no blocks");
  RealMatrix out(rows, std::vector<ExactReal>(cols, ExactReal(0)));
  size_t r0 = 0, c0 = 0;
  std::ostringstream prov;
  prov << "block-diagonal";
  for (const auto& b : blocks) {
    for (size_t i = 0; i < b.size(); ++i) {
      for (size_t j = 0; j < b[i].size(); ++j) out[r0 + i][c0 + j] = b[i][j];
    }
    prov << " " << b.size() << "x" << b.front().size() << "@(" << r0 << "," << c0 << ")";
    r0 += b.size();
    c0 += b.front().size();
  }
  return MatrixBuild{MatrixBuild::Kind::BlockDiagonal, std::move(out), prov.str()};
}

MatrixBuild extend_columns(const RealMatrix& V, const RealMatrix& B) {
  if (V.size() != B.size() || V.empty()) throw DimensionMismatch("extend_columns needs equal row counts");
  RealMatrix out = V;
  for (size_t i = 0; i < V.size(); ++i) {
    if (V[i].size() != V[0].size() || B[i].size() != B[0].size()) throw DimensionMismatch("ragged matrix");
    out[i].insert(out[i].end(), B[i].begin(), B[i].end());
  }
  return MatrixBuild{MatrixBuild::Kind::ExtendColumns, std::move(out),
                     "extend-columns +" + std::to_string(B[0].size())};
}

MatrixBuild transpose(const RealMatrix& omega) {
  if (omega.empty() || omega.front().empty()) throw DimensionMismatch("empty matrix");
  RealMatrix t(omega.front().size(), std::vector<ExactReal>(omega.size()));
  for (size_t i = 0; i < omega.size(); ++i) {
    if (omega[i].size() != omega.front().size()) throw DimensionMismatch("ragged matrix");
    for (size_t j = 0; j < omega[i].size(); ++j) t[j][i] = omega[i][j];
  }
  return MatrixBuild{MatrixBuild::Kind::Transpose, std::move(t), "transpose"};
}

std::vector<Rational> sample_extension(size_t dims, uint64_t seed, uint64_t index) {
  if (dims < 1) throw std::invalid_argument("dims must be >= 1");
  constexpr uint64_t kScale = 1ULL << 20;
  CounterRng rng(seed, index);
  uint64_t counter = 0;
  std::vector<long> x(dims);
  for (;;) {
    Integer sum(0);
    for (auto& xi : x) {
      xi = static_cast<long>(rng.uniform(2 * kScale + 1, counter)) - static_cast<long>(kScale);
      sum += Integer(xi) * xi;
    }
    if (sum <= Integer(kScale) * Integer(kScale)) break;
  }
  std::vector<Rational> out;
  for (long xi : x) out.push_back(ratio(xi, kScale));
  for (auto& q : out) q.canonicalize();
  return out;
}

}  // namespace dlab
