#include "kernel.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "dlab/errors.hpp"

namespace dlab {

unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

namespace {

i128 to_i128(const Integer& z) {
  if (bit_length(z) > 126) throw std::overflow_error("integer exceeds 126 bits");
  Integer a = abs(z);
  Integer hi = a >> 64;
  Integer lo = a - (hi << 64);
  i128 v = (static_cast<i128>(hi.get_ui()) << 64) | static_cast<i128>(lo.get_ui());
  return z < 0 ? -v : v;
}

i128 mod_pos(i128 a, i128 d) {
  i128 r = a % d;
  return r < 0 ? r + d : r;
}

}  // namespace

Rational to_rational(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  Integer hi(static_cast<unsigned long>(u >> 64));
  Integer lo(static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL));
  Integer z = (hi << 64) + lo;
  return Rational(neg ? Integer(-z) : z);
}

long double canonical_points(size_t n, long double h) {
  return (std::pow(2 * h + 1, static_cast<long double>(n)) - 1) / 2;
}

std::optional<KernelSetup> make_setup(const ApproxProblem& problem, int64_t radius) {
  if (!problem.max_max() || problem.m > kMaxDim || problem.n > kMaxDim) return std::nullopt;
  KernelSetup s;
  s.m = problem.m;
  s.n = problem.n;
  s.P.assign(s.m * s.n, 0);
  size_t scale_bits = bit_length(Integer(static_cast<unsigned long>(s.n)) * Integer(static_cast<long>(radius) + 1));

  if (problem.all_rational()) {
    Integer D(1);
    for (const auto& row : problem.omega) {
      for (const auto& x : row) {
        Integer den = x.rational()->get_den();
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), den.get_mpz_t());
      }
    }
    if (bit_length(D) + scale_bits < 118) {
      s.exact = true;
      s.D = to_i128(D);
      for (size_t i = 0; i < s.m; ++i) {
        for (size_t j = 0; j < s.n; ++j) {
          Rational q = *problem.omega[i][j].rational() * Rational(D);
          Integer num = q.get_num();
          Integer r;
          mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), D.get_mpz_t());
          s.P[i * s.n + j] = to_i128(r);
        }
      }
      return s;
    }
  }

  long k = 118 - static_cast<long>(scale_bits);
  if (k < 24) return std::nullopt;
  for (;;) {
    try {
      Integer D(1);
      D <<= static_cast<mp_bitcnt_t>(k);
      for (size_t i = 0; i < s.m; ++i) {
        for (size_t j = 0; j < s.n; ++j) {
          IntervalReal x = problem.omega[i][j].eval_bits(k);
          Integer f = floor_q(x.lo() * Rational(D));
          Integer r;
          mpz_fdiv_r(r.get_mpz_t(), f.get_mpz_t(), D.get_mpz_t());
          s.P[i * s.n + j] = to_i128(r);
        }
      }
      s.exact = false;
      s.D = to_i128(D);
      s.err = 2;
      return s;
    } catch (const InsufficientLevels&) {
      if (k <= 24) return std::nullopt;
      k = std::max(24L, k / 2);
    }
  }
}

std::vector<Contender> scan_shell(const KernelSetup& s, int64_t h, std::optional<i128> threshold) {
  std::vector<Contender> out;
  const i128 D = s.D;
  const size_t m = s.m, n = s.n;
  i128 best_hi = std::numeric_limits<i128>::max();
  std::array<int64_t, kMaxDim> b{};

  auto consider = [&](i128 q, i128 e) {
    i128 lower = q - e;
    if (threshold) {
      if (lower <= *threshold) out.push_back(Contender{b, q, e});
      return;
    }
    if (lower <= best_hi) out.push_back(Contender{b, q, e});
    if (q + e < best_hi) best_hi = q + e;
  };

  auto rec = [&](auto&& self, size_t j, const std::array<i128, kMaxDim>& res, bool has_max, int lastsign,
                 int64_t abs_sum) -> void {
    if (j + 1 == n) {
      int64_t v0, v1;
      if (has_max) {
        v0 = lastsign > 0 ? 0 : 1;
        v1 = h;
      } else {
        v0 = v1 = h;
      }
      std::array<i128, kMaxDim> r{};
      std::array<i128, kMaxDim> step{};
      for (size_t i = 0; i < m; ++i) {
        step[i] = s.P[i * n + j];
        r[i] = mod_pos(res[i] + static_cast<i128>(v0) * step[i], D);
      }
      for (int64_t v = v0; v <= v1; ++v) {
        i128 q = 0;
        for (size_t i = 0; i < m; ++i) {
          i128 d = r[i] < D - r[i] ? r[i] : D - r[i];
          if (d > q) q = d;
          r[i] += step[i];
          if (r[i] >= D) r[i] -= D;
        }
        b[j] = v;
        consider(q, s.err * (abs_sum + (v < 0 ? -v : v)));
      }
      return;
    }
    std::array<i128, kMaxDim> next{};
    for (size_t i = 0; i < m; ++i) next[i] = mod_pos(res[i] - static_cast<i128>(h) * s.P[i * n + j], D);
    for (int64_t v = -h; v <= h; ++v) {
      b[j] = v;
      int64_t av = v < 0 ? -v : v;
      self(self, j + 1, next, has_max || av == h, v != 0 ? (v > 0 ? 1 : -1) : lastsign, abs_sum + av);
      for (size_t i = 0; i < m; ++i) {
        next[i] += s.P[i * n + j];
        if (next[i] >= D) next[i] -= D;
      }
    }
  };

  std::array<i128, kMaxDim> zero{};
  rec(rec, 0, zero, false, 0, 0);

  if (!threshold) {
    std::vector<Contender> kept;
    for (auto& c : out) {
      if (c.q - c.e <= best_hi) kept.push_back(c);
    }
    return kept;
  }
  return out;
}

}  // namespace detail
}  // namespace dlab
