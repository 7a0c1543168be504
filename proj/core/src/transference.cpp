#include "dlab/transference.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dlab/constructions.hpp"
#include "dlab/errors.hpp"
#include "dlab/parallel.hpp"
#include "dlab/prng.hpp"
#include "dlab/real.hpp"

namespace dlab {

namespace {

// q^e for a possibly negative integer exponent.
Rational pow_z(const Rational& q, long e) {
  if (e >= 0) return pow_q(q, static_cast<unsigned long>(e));
  if (q == 0) throw std::domain_error("negative power of zero");
  return 1 / pow_q(q, static_cast<unsigned long>(-e));
}

void check_shape(const RationalMatrix& omega) {
  if (omega.empty() || omega[0].empty()) throw DimensionMismatch("empty matrix");
  for (const auto& row : omega) {
    if (row.size() != omega[0].size()) throw DimensionMismatch("ragged matrix");
  }
}

ApproxProblem primal_problem(const RationalMatrix& omega) {
  return ApproxProblem::with_max_norms(rational_matrix(omega));
}

// Dual-box point z = (ẑ, z̃) from a box point (b̂', b̃') of Ω^T.
IntVector dual_from_transposed(const IntVector& b, size_t n, size_t m) {
  IntVector z(n + m);
  for (size_t j = 0; j < m; ++j) z[n + j] = b[j];
  for (size_t i = 0; i < n; ++i) z[i] = -b[m + i];
  return z;
}

BoxResult dual_box(const ApproxProblem& primal, const RootBound& A, const RootBound& B, const EnumConfig& cfg) {
  BoxResult r = dirichlet_box_nonempty(primal.transposed(), B, A, Boundary::NonStrict, cfg);
  if (r.found) r.b = dual_from_transposed(r.b, primal.n, primal.m);
  return r;
}

}  // namespace

TransferBox::TransferBox(RationalMatrix omega_, Rational A_, Rational B_, Orientation orientation_)
    : omega(std::move(omega_)), A(std::move(A_)), B(std::move(B_)), orientation(orientation_) {
  check_shape(omega);
  if (A <= 0 || B <= 0) throw std::invalid_argument("box bounds must be positive");
}

bool TransferBox::contains(const IntVector& z) const {
  const size_t n_ = n(), m_ = m();
  if (z.size() != n_ + m_) throw DimensionMismatch("point dimension must be n + m");
  if (orientation == Orientation::Primal) {
    for (size_t i = 0; i < n_; ++i) {
      if (abs_q(Rational(z[i])) > B) return false;
    }
    for (size_t j = 0; j < m_; ++j) {
      Rational s(z[n_ + j]);
      for (size_t i = 0; i < n_; ++i) s += omega[j][i] * Rational(z[i]);
      if (abs_q(s) > A) return false;
    }
    return true;
  }
  for (size_t j = 0; j < m_; ++j) {
    if (abs_q(Rational(z[n_ + j])) > A) return false;
  }
  for (size_t i = 0; i < n_; ++i) {
    Rational s(z[i]);
    for (size_t j = 0; j < m_; ++j) s -= omega[j][i] * Rational(z[n_ + j]);
    if (abs_q(s) > B) return false;
  }
  return true;
}

std::vector<IntVector> TransferBox::points(uint64_t budget) const {
  const size_t n_ = n(), m_ = m();
  const bool primal = orientation == Orientation::Primal;
  // Outer block: coordinates with a plain bound; inner block: the linear forms.
  const size_t outer = primal ? n_ : m_;
  const size_t inner = primal ? m_ : n_;
  const Integer r = floor_q(primal ? B : A);
  const Rational lin = primal ? A : B;
  long double count = 1;
  for (size_t k = 0; k < outer; ++k) count *= static_cast<long double>(2 * r.get_si() + 1);
  if (count > static_cast<long double>(budget)) throw BudgetExceeded("box enumeration exceeds budget");

  std::vector<IntVector> out;
  IntVector x(outer, Integer(-r));
  for (;;) {
    // Centers of the inner ranges.
    std::vector<Rational> center(inner);
    for (size_t k = 0; k < inner; ++k) {
      Rational s(0);
      for (size_t l = 0; l < outer; ++l) {
        s += (primal ? omega[k][l] : omega[l][k]) * Rational(x[l]);
      }
      center[k] = primal ? Rational(-s) : s;
    }
    std::vector<Integer> lo(inner), hi(inner);
    bool empty = false;
    for (size_t k = 0; k < inner; ++k) {
      lo[k] = ceil_q(center[k] - lin);
      hi[k] = floor_q(center[k] + lin);
      if (lo[k] > hi[k]) empty = true;
    }
    if (!empty) {
      IntVector y = lo;
      for (;;) {
        IntVector z(n_ + m_);
        for (size_t l = 0; l < outer; ++l) z[primal ? l : n_ + l] = x[l];
        for (size_t k = 0; k < inner; ++k) z[primal ? n_ + k : k] = y[k];
        if (std::any_of(z.begin(), z.end(), [](const Integer& v) { return v != 0; })) out.push_back(std::move(z));
        size_t k = inner;
        while (k > 0 && y[k - 1] == hi[k - 1]) {
          y[k - 1] = lo[k - 1];
          --k;
        }
        if (k == 0) break;
        ++y[k - 1];
      }
    }
    size_t l = outer;
    while (l > 0 && x[l - 1] == r) {
      x[l - 1] = -r;
      --l;
    }
    if (l == 0) break;
    ++x[l - 1];
  }
  if (!primal) std::sort(out.begin(), out.end());
  return out;
}

BoxResult TransferBox::nonzero_point(const EnumConfig& config) const {
  ApproxProblem pb = primal_problem(omega);
  if (orientation == Orientation::Primal) {
    return dirichlet_box_nonempty(pb, A, B, Boundary::NonStrict, config);
  }
  return dual_box(pb, RootBound::of(A), RootBound::of(B), config);
}

DualParams dual_params(long n, long m, const Rational& A, const Rational& B, const Rational& C, long bits) {
  if (n < 1 || m < 1) throw std::invalid_argument("dimensions must be positive");
  if (A <= 0 || B <= 0 || C <= 0) throw std::invalid_argument("A, B, C must be positive");
  const auto k = static_cast<unsigned>(n + m - 1);
  DualParams d;
  d.n = n;
  d.m = m;
  d.C = C;
  d.A_star = RootBound{C, pow_z(A, n) * pow_z(B, 1 - n), k};
  d.B_star = RootBound{C, pow_z(A, 1 - m) * pow_z(B, m), k};
  d.A_star_value = d.A_star.enclose(bits);
  d.B_star_value = d.B_star.enclose(bits);
  return d;
}

std::string to_string(TransferVerdict v) {
  switch (v) {
    case TransferVerdict::ImplicationHolds:
      return "ImplicationHolds";
    case TransferVerdict::PrimalEmpty:
      return "PrimalEmpty";
    case TransferVerdict::CounterexampleAtThisC:
      return "CounterexampleAtThisC";
  }
  return "?";
}

TransferCheck verify_transference(const RationalMatrix& omega, const Rational& A, const Rational& B,
                                  const Rational& C, const EnumConfig& config) {
  check_shape(omega);
  ApproxProblem pb = primal_problem(omega);
  TransferCheck out;
  out.params = dual_params(static_cast<long>(pb.n), static_cast<long>(pb.m), A, B, C);
  BoxResult primal = dirichlet_box_nonempty(pb, A, B, Boundary::NonStrict, config);
  if (!primal.found) {
    out.verdict = TransferVerdict::PrimalEmpty;
    return out;
  }
  out.primal_point = primal.b;
  BoxResult dual = dual_box(pb, out.params.A_star, out.params.B_star, config);
  if (dual.found) {
    out.dual_point = dual.b;
    out.verdict = TransferVerdict::ImplicationHolds;
  } else {
    out.verdict = TransferVerdict::CounterexampleAtThisC;
  }
  return out;
}

std::optional<Rational> minimal_transfer_constant(const RationalMatrix& omega, const Rational& A, const Rational& B,
                                                  const Rational& C_max, long denominator,
                                                  const EnumConfig& config) {
  check_shape(omega);
  if (denominator < 1 || C_max <= 0) throw std::invalid_argument("calibration grid must be positive");
  ApproxProblem pb = primal_problem(omega);
  if (!dirichlet_box_nonempty(pb, A, B, Boundary::NonStrict, config).found) return std::nullopt;
  auto passes = [&](long k) {
    DualParams d = dual_params(static_cast<long>(pb.n), static_cast<long>(pb.m), A, B, ratio(k, denominator));
    return dual_box(pb, d.A_star, d.B_star, config).found;
  };
  long hi = floor_q(C_max * denominator).get_si();
  if (hi < 1 || !passes(hi)) return std::nullopt;
  long lo = 0;  // invariant: lo fails (or is 0), hi passes
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return ratio(hi, denominator);
}

RationalMatrix random_rational_matrix(size_t rows, size_t cols, long max_den, uint64_t seed, uint64_t index) {
  if (max_den < 1) throw std::invalid_argument("max_den must be >= 1");
  CounterRng rng(seed, 0x7F000000ULL + index);
  uint64_t counter = 0;
  RationalMatrix out(rows, std::vector<Rational>(cols));
  for (auto& row : out) {
    for (auto& x : row) {
      long den = 1 + static_cast<long>(rng.uniform(static_cast<uint64_t>(max_den), counter));
      long num = static_cast<long>(rng.uniform(static_cast<uint64_t>(2 * den + 1), counter)) - den;
      x = ratio(num, den);
    }
  }
  return out;
}

std::vector<std::pair<Rational, Rational>> calibration_grid(long k_max, long j_max) {
  std::vector<std::pair<Rational, Rational>> grid;
  for (long k = 0; k <= k_max; ++k) {
    for (long j = 0; j <= j_max; ++j) grid.emplace_back(pow2(-k), pow2(j));
  }
  return grid;
}

CalibrationReport calibrate_transfer_constant(long n, long m, const CalibrationOptions& opt,
                                              const EnumConfig& config) {
  if (n < 1 || m < 1) throw std::invalid_argument("dimensions must be positive");
  const auto grid = calibration_grid(opt.k_max, opt.j_max);
  struct Partial {
    Rational C{0};
    size_t empty = 0;
    size_t missing = 0;
  };
  std::vector<Partial> parts(opt.trials);
  EnumConfig inner = config;
  inner.threads = 1;
  parallel_for(opt.trials, config.threads, [&](size_t t) {
    RationalMatrix omega =
        random_rational_matrix(static_cast<size_t>(m), static_cast<size_t>(n), opt.max_den, opt.seed, t);
    Partial& p = parts[t];
    ApproxProblem pb = primal_problem(omega);
    for (const auto& [A, B] : grid) {
      if (!dirichlet_box_nonempty(pb, A, B, Boundary::NonStrict, inner).found) {
        ++p.empty;
        continue;
      }
      auto c = minimal_transfer_constant(omega, A, B, opt.C_max, opt.denominator, inner);
      if (!c) {
        ++p.missing;
      } else if (*c > p.C) {
        p.C = *c;
      }
    }
  });
  CalibrationReport rep;
  rep.n = n;
  rep.m = m;
  rep.matrices = opt.trials;
  rep.cases = opt.trials * grid.size();
  rep.C = 0;
  for (const auto& p : parts) {
    rep.C = std::max(rep.C, p.C);
    rep.primal_empty += p.empty;
    rep.uncalibrated += p.missing;
  }
  return rep;
}

std::optional<Rational> default_transfer_constant(long n, long m) {
  if (n < 1 || m < 1) throw std::invalid_argument("dimensions must be positive");
  // 200 matrices, A ∈ {1, ..., 1/16}, B ∈ {1, ..., 16}, grid 1/16.
  static const std::map<std::pair<long, long>, Rational> table = {
      {{1, 1}, Rational(1)}, {{2, 1}, Rational(1)}, {{1, 2}, Rational(1)},
      {{3, 1}, Rational(1)}, {{1, 3}, Rational(1)}, {{2, 2}, Rational(1)},
  };
  auto it = table.find({n, m});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

IntervalReal transpose_delta(long n, long m, const Rational& C, const Rational& rho, long bits) {
  if (n < 1 || m < 1 || C <= 0 || rho <= 0) throw std::invalid_argument("delta needs positive parameters");
  const long k = n + m - 1;
  RootBound d{Rational(1), pow_z(C, (m + n) * k) * pow_z(rho, m), static_cast<unsigned>(n * k)};
  return d.enclose(bits);
}

TransposeReport transpose_folklore_check(const ApproxProblem& problem, const Rational& C, const Rational& rho,
                                         const std::vector<Rational>& heights, const std::optional<Rational>& kappa,
                                         const EnumConfig& config) {
  if (C <= 0 || rho <= 0) throw std::invalid_argument("C and rho must be positive");
  const long n = static_cast<long>(problem.n), m = static_cast<long>(problem.m);
  const long k = n + m - 1;
  TransposeReport rep;
  rep.n = n;
  rep.m = m;
  rep.kappa = kappa.value_or(rho);
  if (rep.kappa <= 0) throw std::invalid_argument("kappa must be positive");
  const Rational base = pow_z(C, (m + n) * k) * pow_z(rho, m);
  rep.delta_root = RootBound{Rational(1), base, static_cast<unsigned>(n * k)};
  rep.delta = rep.delta_root.enclose(96);

  const ApproxProblem pt = problem.transposed();
  const Rational e = ratio(m, n);
  std::vector<ApproxRecord> records;
  if (!heights.empty()) {
    Rational cap = *std::max_element(heights.begin(), heights.end());
    if (cap >= 1) {
      try {
        records = best_approx_sequence(pt, Rational(floor_q(cap)), config);
      } catch (const CertificationFailure&) {
        records.clear();
      }
    }
  }
  for (const Rational& u : heights) {
    if (u <= 0) throw std::invalid_argument("heights must be positive");
    TransposeRow row;
    row.u = u;
    const Rational decay = pow_z(u, -m);
    RootBound di_bound{Rational(1), base * pow_z(decay, k), static_cast<unsigned>(n * k)};
    RootBound ns_bound{rep.kappa, decay, static_cast<unsigned>(n)};
    row.di_evidence = dirichlet_box_nonempty(pt, di_bound, RootBound::of(u), Boundary::NonStrict, config).found;
    row.nonsing_evidence = !dirichlet_box_nonempty(pt, ns_bound, RootBound::of(u), Boundary::NonStrict, config).found;
    if (!records.empty()) {
      if (auto q = psi_from_records(records, u)) {
        row.normalized = pow_enclosure(IntervalReal(u), e, 96) * *q;
        const IntervalReal& v = *row.normalized;
        if (!rep.normalized_max || v.hi() > rep.normalized_max->hi()) rep.normalized_max = v;
        if (!rep.normalized_min || v.lo() < rep.normalized_min->lo()) rep.normalized_min = v;
      }
    }
    rep.di_count += row.di_evidence ? 1 : 0;
    rep.nonsing_count += row.nonsing_evidence ? 1 : 0;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace dlab
