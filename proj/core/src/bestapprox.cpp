#include "dlab/bestapprox.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/parallel.hpp"
#include "dlab/real.hpp"
#include "kernel.hpp"

namespace dlab {

namespace {

Rational to_q(const Integer& z) { return Rational(z); }

bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::optional<Rational> height_key(const NormDescriptor& norm, const IntVector& b) {
  switch (norm.kind()) {
    case NormKind::Max: {
      Integer m(0);
      for (const auto& x : b) m = std::max(m, Integer(abs(x)));
      return to_q(m);
    }
    case NormKind::WeightedMax: {
      Rational m(0);
      for (size_t i = 0; i < b.size(); ++i) m = std::max(m, Rational(norm.weights()[i] * to_q(abs(b[i]))));
      return m;
    }
    case NormKind::P: {
      if (norm.p_value().get_den() != 1) return std::nullopt;
      unsigned long p = norm.p_value().get_num().get_ui();
      Integer s(0);
      for (const auto& x : b) {
        Integer t;
        mpz_pow_ui(t.get_mpz_t(), Integer(abs(x)).get_mpz_t(), p);
        s += t;
      }
      return to_q(s);
    }
    case NormKind::Custom: {
      if (!norm.functional_spec()) return std::nullopt;
      std::vector<Rational> v;
      for (const auto& x : b) v.push_back(to_q(x));
      return norm.eval(v, 64).lo();
    }
  }
  return std::nullopt;
}

// Key comparable with height_key for a rational threshold t.
Rational threshold_key(const NormDescriptor& norm, const Rational& t) {
  if (norm.kind() == NormKind::P && norm.p_value().get_den() == 1 && norm.p_value() != 1) {
    return pow_q(t, norm.p_value().get_num().get_ui());
  }
  return t;
}

struct Candidate {
  IntVector b_hat;
  IntervalReal height;
  std::optional<Rational> hkey;
  QualityEval qe;
  long bits = 64;
  bool certified = true;
};

long initial_bits(const IntVector& b) {
  size_t mx = 0;
  for (const auto& x : b) mx = std::max(mx, bit_length(x));
  return 64 + static_cast<long>(mx);
}

Candidate make_candidate(const ApproxProblem& pb, IntVector b_hat, long bits) {
  Candidate c;
  c.b_hat = std::move(b_hat);
  c.bits = bits;
  c.hkey = height_key(pb.norm1, c.b_hat);
  for (;;) {
    try {
      c.height = height_of(pb, c.b_hat, c.bits);
      c.qe = evaluate_quality(pb, c.b_hat, c.bits);
      return c;
    } catch (const InsufficientLevels&) {
      if (c.bits <= 16) throw;
      c.bits = std::max(16L, c.bits / 2);
    }
  }
}

void refine(const ApproxProblem& pb, Candidate& c, const EnumConfig& cfg) {
  if (c.bits >= cfg.max_bits) {
    throw CertificationFailure("refinement budget exhausted for candidate at precision 2^-" + std::to_string(c.bits));
  }
  // Doubling may overshoot what a finite series can deliver; back off towards
  // the current precision before giving up.
  long target = std::min(cfg.max_bits, c.bits * 2);
  for (;;) {
    try {
      c.qe = evaluate_quality(pb, c.b_hat, target);
      break;
    } catch (const InsufficientLevels&) {
      long step = (target - c.bits) / 2;
      if (step < 16) throw;
      target = c.bits + step;
    }
  }
  c.bits = target;
  if (!c.hkey) c.height = height_of(pb, c.b_hat, c.bits);
}

void ensure_resolved(const ApproxProblem& pb, Candidate& c, const EnumConfig& cfg) {
  while (!c.qe.resolved) refine(pb, c, cfg);
}

// Row j of Ω b̂ as rational part plus integer combination of irrational entries,
// keyed by generator identity.
struct RowForm {
  Rational constant{0};
  std::map<const RealGenerator*, Rational> atoms;
};

RowForm row_form(const ApproxProblem& pb, size_t i, const IntVector& b) {
  RowForm f;
  for (size_t j = 0; j < pb.n; ++j) {
    if (b[j] == 0) continue;
    const ExactReal& x = pb.omega[i][j];
    if (auto q = x.rational()) {
      f.constant += *q * to_q(b[j]);
    } else {
      Rational& c = f.atoms[x.generator().get()];
      c += to_q(b[j]);
      if (c == 0) f.atoms.erase(x.generator().get());
    }
  }
  return f;
}

// ‖f‖ = ‖g‖ (distance to Z) because f ∓ g is an integer.
bool same_distance(const RowForm& f, const RowForm& g, bool allow_sign) {
  if (f.atoms == g.atoms && Rational(f.constant - g.constant).get_den() == 1) return true;
  if (!allow_sign || f.atoms.size() != g.atoms.size()) return false;
  for (const auto& [k, c] : f.atoms) {
    auto it = g.atoms.find(k);
    if (it == g.atoms.end() || it->second != -c) return false;
  }
  return Rational(f.constant + g.constant).get_den() == 1;
}

IntervalReal distance_to_integers(const IntervalReal& y) {
  if (auto fl = y.floor()) {
    IntervalReal f = y - IntervalReal(to_q(*fl));
    return imin(f, IntervalReal(1) - f);
  }
  Integer k = ceil_q(y.lo());
  return IntervalReal(Rational(0), std::max(to_q(k) - y.lo(), y.hi() - to_q(k)));
}

// Index of a row whose weighted distance is certainly maximal, allowing exact
// ties between rows.
std::optional<size_t> certified_max_row(const ApproxProblem& pb, const std::vector<RowForm>& forms, const IntVector& b,
                                        long bits) {
  std::vector<IntervalReal> d(pb.m);
  for (size_t i = 0; i < pb.m; ++i) {
    IntervalReal y(forms[i].constant);
    for (size_t j = 0; j < pb.n; ++j) {
      if (b[j] == 0 || pb.omega[i][j].is_rational()) continue;
      y += pb.omega[i][j].eval_bits(bits + 8 + static_cast<long>(bit_length(b[j]))) * IntervalReal(to_q(b[j]));
    }
    d[i] = distance_to_integers(y);
    if (pb.norm2.kind() == NormKind::WeightedMax) d[i] = d[i] * IntervalReal(pb.norm2.weights()[i]);
  }
  for (size_t top = 0; top < pb.m; ++top) {
    bool ok = true;
    for (size_t i = 0; i < pb.m && ok; ++i) {
      if (i == top || d[i].hi() < d[top].lo()) continue;
      bool same_weight = pb.norm2.kind() == NormKind::Max || pb.norm2.weights()[i] == pb.norm2.weights()[top];
      ok = same_weight && same_distance(forms[i], forms[top], true);
    }
    if (ok) return top;
  }
  return std::nullopt;
}

// Exact quality tie that interval refinement cannot resolve. Every row pair
// matching proves it for any norm (with signs, for norms of |x_i|); for max
// norms the certified maximal rows suffice.
bool symbolic_tie(const ApproxProblem& pb, const IntVector& a, const IntVector& b, long bits) {
  std::vector<RowForm> fa(pb.m), fb(pb.m);
  for (size_t i = 0; i < pb.m; ++i) {
    fa[i] = row_form(pb, i, a);
    fb[i] = row_form(pb, i, b);
  }
  const bool monotone = pb.norm2.is_monotone();
  bool all_rows = true;
  for (size_t i = 0; i < pb.m && all_rows; ++i) all_rows = same_distance(fa[i], fb[i], monotone);
  if (all_rows) return true;
  const NormKind kind = pb.norm2.kind();
  if (kind != NormKind::Max && kind != NormKind::WeightedMax) return false;
  auto ia = certified_max_row(pb, fa, a, bits), ib = certified_max_row(pb, fb, b, bits);
  if (!ia || !ib) return false;
  if (kind == NormKind::WeightedMax && pb.norm2.weights()[*ia] != pb.norm2.weights()[*ib]) return false;
  return same_distance(fa[*ia], fb[*ib], true);
}

int cmp_quality(const ApproxProblem& pb, Candidate& a, Candidate& b, const EnumConfig& cfg) {
  for (;;) {
    if (a.qe.exact_key && b.qe.exact_key) {
      return *a.qe.exact_key < *b.qe.exact_key ? -1 : (*a.qe.exact_key > *b.qe.exact_key ? 1 : 0);
    }
    switch (cmp_certified(a.qe.quality, b.qe.quality)) {
      case Ordering::Less:
        return -1;
      case Ordering::Greater:
        return 1;
      case Ordering::Overlap:
        break;
    }
    if (a.qe.quality.is_point() && b.qe.quality.is_point()) return 0;
    if (symbolic_tie(pb, a.b_hat, b.b_hat, std::min(a.bits, b.bits))) return 0;
    if (a.qe.quality.width() >= b.qe.quality.width()) {
      refine(pb, a, cfg);
    } else {
      refine(pb, b, cfg);
    }
  }
}

bool same_abs_multiset(IntVector a, IntVector b) {
  for (auto& x : a) x = abs(x);
  for (auto& x : b) x = abs(x);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

int cmp_height(const ApproxProblem& pb, Candidate& a, Candidate& b, const EnumConfig& cfg) {
  if (a.hkey && b.hkey) return *a.hkey < *b.hkey ? -1 : (*a.hkey > *b.hkey ? 1 : 0);
  if (pb.norm1.kind() == NormKind::P && same_abs_multiset(a.b_hat, b.b_hat)) return 0;
  for (;;) {
    switch (cmp_certified(a.height, b.height)) {
      case Ordering::Less:
        return -1;
      case Ordering::Greater:
        return 1;
      case Ordering::Overlap:
        break;
    }
    if (a.height.is_point() && b.height.is_point()) return 0;
    refine(pb, a, cfg);
    refine(pb, b, cfg);
  }
}

// -1 if a is lexicographically before b in (b̂, b̃).
bool lex_before(const ApproxProblem& pb, Candidate& a, Candidate& b, const EnumConfig& cfg) {
  if (a.b_hat != b.b_hat) return lex_less(a.b_hat, b.b_hat);
  ensure_resolved(pb, a, cfg);
  ensure_resolved(pb, b, cfg);
  return lex_less(a.qe.b_tilde, b.qe.b_tilde);
}

// Pareto staircase: heights strictly increasing, qualities strictly decreasing.
class Frontier {
 public:
  Frontier(const ApproxProblem& pb, const EnumConfig& cfg) : pb_(pb), cfg_(cfg) {}

  bool dominates(Candidate& e, Candidate& c) {
    int hc = cmp_height(pb_, e, c, cfg_);
    if (hc > 0) return false;
    int qc = cmp_quality(pb_, e, c, cfg_);
    if (qc > 0) return false;
    if (hc == 0 && qc == 0) return lex_before(pb_, e, c, cfg_);
    return true;
  }

  // Returns true if c entered the frontier.
  bool insert(Candidate c) {
    // Predecessor: last element with height <= h(c).
    for (size_t k = items_.size(); k-- > 0;) {
      int hc = cmp_height(pb_, items_[k], c, cfg_);
      if (hc <= 0) {
        if (dominates(items_[k], c)) return false;
        break;
      }
    }
    std::vector<Candidate> kept;
    kept.reserve(items_.size() + 1);
    bool placed = false;
    for (auto& e : items_) {
      if (!placed && cmp_height(pb_, e, c, cfg_) >= 0) {
        if (dominates(c, e)) continue;
        kept.push_back(c);
        placed = true;
      } else if (placed && dominates(c, e)) {
        continue;
      }
      kept.push_back(std::move(e));
    }
    if (!placed) kept.push_back(std::move(c));
    items_ = std::move(kept);
    return true;
  }

  std::vector<Candidate>& items() { return items_; }

  bool terminal() const {
    return !items_.empty() && items_.back().qe.quality.is_point() && items_.back().qe.quality.lo() == 0;
  }

 private:
  const ApproxProblem& pb_;
  const EnumConfig& cfg_;
  std::vector<Candidate> items_;
};

std::vector<ApproxRecord> to_records(const ApproxProblem& pb, std::vector<Candidate>& items, const EnumConfig& cfg) {
  std::vector<ApproxRecord> out;
  for (auto& c : items) {
    ensure_resolved(pb, c, cfg);
    ApproxRecord r;
    r.b_hat = c.b_hat;
    r.b_tilde = c.qe.b_tilde;
    r.height = c.hkey && pb.norm1.kind() != NormKind::P ? IntervalReal(*c.hkey) : c.height;
    r.quality = c.qe.quality;
    r.index = out.size() + 1;
    r.certified = c.certified;
    out.push_back(std::move(r));
  }
  return out;
}

Candidate from_record(const ApproxProblem& pb, const ApproxRecord& r) {
  Candidate c = make_candidate(pb, r.b_hat, initial_bits(r.b_hat));
  c.certified = r.certified;
  return c;
}

// Certified height(b) <= t.
bool height_within(const ApproxProblem& pb, Candidate& c, const Rational& t, const Rational& tkey,
                   const EnumConfig& cfg) {
  if (c.hkey) return *c.hkey <= tkey;
  for (;;) {
    if (c.height.hi() <= t) return true;
    if (c.height.lo() > t) return false;
    refine(pb, c, cfg);
  }
}

IntVector to_int_vector(const std::array<int64_t, detail::kMaxDim>& b, size_t n) {
  IntVector v(n);
  for (size_t j = 0; j < n; ++j) v[j] = Integer(static_cast<long>(b[j]));
  return v;
}

void check_budget(long double points, const EnumConfig& cfg) {
  if (points > static_cast<long double>(cfg.budget)) {
    throw BudgetExceeded("enumeration of ~" + std::to_string(static_cast<double>(points)) +
                         " points exceeds the budget of " + std::to_string(cfg.budget));
  }
}

std::vector<ApproxRecord> sequence_fast(const ApproxProblem& pb, int64_t R, const detail::KernelSetup& setup,
                                        const EnumConfig& cfg) {
  Frontier frontier(pb, cfg);
  const int64_t batch = std::max<int64_t>(64, static_cast<int64_t>(cfg.threads) * 8);
  for (int64_t start = 1; start <= R; start += batch) {
    int64_t stop = std::min(R, start + batch - 1);
    std::vector<std::vector<detail::Contender>> shells(static_cast<size_t>(stop - start + 1));
    parallel_for(shells.size(), cfg.threads, [&](size_t i) {
      auto cs = detail::scan_shell(setup, start + static_cast<int64_t>(i), std::nullopt);
      if (setup.exact && cs.size() > 1) {
        // Exact ties: same quality, so the lexicographically smallest b̂ wins.
        detail::i128 qmin = cs.front().q;
        for (const auto& c : cs) qmin = std::min(qmin, c.q);
        const detail::Contender* best = nullptr;
        for (const auto& c : cs) {
          if (c.q != qmin) continue;
          if (!best || std::lexicographical_compare(c.b.begin(), c.b.begin() + setup.n, best->b.begin(),
                                                    best->b.begin() + setup.n)) {
            best = &c;
          }
        }
        cs = {*best};
      }
      shells[i] = std::move(cs);
    });
    for (size_t i = 0; i < shells.size(); ++i) {
      auto& cs = shells[i];
      if (cs.empty()) continue;
      std::vector<Candidate> group;
      for (const auto& c : cs) group.push_back(make_candidate(pb, to_int_vector(c.b, setup.n), initial_bits({Integer(static_cast<long>(start + static_cast<int64_t>(i)))})));
      size_t best = 0;
      for (size_t k = 1; k < group.size(); ++k) {
        int qc = cmp_quality(pb, group[k], group[best], cfg);
        if (qc < 0 || (qc == 0 && lex_before(pb, group[k], group[best], cfg))) best = k;
      }
      frontier.insert(std::move(group[best]));
      if (frontier.terminal()) return to_records(pb, frontier.items(), cfg);
    }
  }
  return to_records(pb, frontier.items(), cfg);
}

std::vector<ApproxRecord> sequence_generic(const ApproxProblem& pb, const Rational& cap, const EnumConfig& cfg) {
  int64_t R = floor_q(cap / pb.norm1.equiv_lo()).get_si();
  if (R < 1) throw std::invalid_argument("empty height range");
  check_budget(detail::canonical_points(pb.n, static_cast<long double>(R)), cfg);
  Frontier frontier(pb, cfg);
  Rational tkey = threshold_key(pb.norm1, cap);
  size_t n = pb.n;
  for (int64_t h = 1; h <= R; ++h) {
    if (frontier.terminal()) {
      const auto& last = frontier.items().back();
      if (Rational(h) * pb.norm1.equiv_lo() > last.height.hi()) break;
    }
    // Canonical points of the shell max |b_j| = h.
    std::vector<int64_t> b(n, -h);
    for (;;) {
      int64_t mx = 0;
      int lastsign = 0;
      for (auto v : b) {
        mx = std::max<int64_t>(mx, v < 0 ? -v : v);
        if (v != 0) lastsign = v > 0 ? 1 : -1;
      }
      if (mx == h && lastsign > 0) {
        IntVector bv(n);
        for (size_t j = 0; j < n; ++j) bv[j] = Integer(static_cast<long>(b[j]));
        Candidate c = make_candidate(pb, std::move(bv), 64);
        if (height_within(pb, c, cap, tkey, cfg)) frontier.insert(std::move(c));
      }
      size_t j = 0;
      while (j < n && b[j] == h) b[j++] = -h;
      if (j == n) break;
      ++b[j];
    }
  }
  return to_records(pb, frontier.items(), cfg);
}

}  // namespace

// ---------------------------------------------------------------------------

ApproxProblem::ApproxProblem(RealMatrix omega_, NormDescriptor norm1_, NormDescriptor norm2_)
    : omega(std::move(omega_)), norm1(std::move(norm1_)), norm2(std::move(norm2_)) {
  m = omega.size();
  if (m == 0) throw DimensionMismatch("matrix needs at least one row");
  n = omega.front().size();
  if (n == 0) throw DimensionMismatch("matrix needs at least one column");
  for (const auto& row : omega) {
    if (row.size() != n) throw DimensionMismatch("ragged matrix");
  }
  if (norm1.dimension() != n) throw DimensionMismatch("norm1 dimension must equal n");
  if (norm2.dimension() != m) throw DimensionMismatch("norm2 dimension must equal m");
}

ApproxProblem ApproxProblem::with_max_norms(RealMatrix omega) {
  size_t rows = omega.size();
  size_t cols = rows ? omega.front().size() : 0;
  if (rows == 0 || cols == 0) throw DimensionMismatch("empty matrix");
  return ApproxProblem(std::move(omega), NormDescriptor::max(cols), NormDescriptor::max(rows));
}

bool ApproxProblem::all_rational() const {
  for (const auto& row : omega) {
    for (const auto& x : row) {
      if (!x.is_rational()) return false;
    }
  }
  return true;
}

ApproxProblem ApproxProblem::transposed() const {
  RealMatrix t(n, std::vector<ExactReal>(m));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) t[j][i] = omega[i][j];
  }
  return with_max_norms(std::move(t));
}

EnumConfig::EnumConfig() : budget(default_budget()), threads(default_threads()) {}

uint64_t default_budget() {
  if (const char* env = std::getenv("DLAB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 100000000ULL;
}

QualityEval evaluate_quality(const ApproxProblem& pb, const IntVector& b_hat, long bits) {
  if (b_hat.size() != pb.n) throw DimensionMismatch("b_hat length must equal n");
  const long extra = static_cast<long>(bit_length(Integer(static_cast<unsigned long>(pb.n)))) + 2;
  std::vector<IntervalReal> y(pb.m);
  std::vector<std::optional<Rational>> yq(pb.m);
  for (size_t i = 0; i < pb.m; ++i) {
    IntervalReal acc(0);
    Rational exact(0);
    bool is_exact = true;
    for (size_t j = 0; j < pb.n; ++j) {
      if (b_hat[j] == 0) continue;
      if (auto q = pb.omega[i][j].rational()) {
        exact += *q * to_q(b_hat[j]);
        acc += IntervalReal(*q * to_q(b_hat[j]));
      } else {
        is_exact = false;
        long guard = extra + static_cast<long>(bit_length(b_hat[j]));
        acc += pb.omega[i][j].eval_bits(bits + guard) * IntervalReal(to_q(b_hat[j]));
      }
    }
    y[i] = is_exact ? IntervalReal(exact) : acc;
    if (is_exact) yq[i] = exact;
  }

  QualityEval out;
  out.b_tilde.assign(pb.m, Integer(0));
  const Rational half(1, 2);

  if (pb.norm2.is_monotone()) {
    std::vector<IntervalReal> d(pb.m);
    bool all_exact = true;
    std::vector<Rational> dq(pb.m);
    for (size_t i = 0; i < pb.m; ++i) {
      const IntervalReal& yi = y[i];
      if (auto fl = yi.floor()) {
        IntervalReal f = yi - IntervalReal(to_q(*fl));
        d[i] = imin(f, IntervalReal(1) - f);
        if (f.hi() < half) {
          out.b_tilde[i] = -*fl;
        } else if (f.lo() > half) {
          out.b_tilde[i] = -(*fl + 1);
        } else if (f.is_point()) {
          out.b_tilde[i] = -(*fl + 1);  // exact half: both roundings tie, take the smaller b̃
        } else {
          out.b_tilde[i] = -*fl;
          out.resolved = false;
        }
      } else {
        Integer k = ceil_q(yi.lo());
        Rational far = std::max(to_q(k) - yi.lo(), yi.hi() - to_q(k));
        d[i] = IntervalReal(Rational(0), far);
        out.b_tilde[i] = -k;
        if (!(yi.lo() > to_q(k) - half && yi.hi() < to_q(k) + half)) out.resolved = false;
      }
      if (d[i].is_point()) {
        dq[i] = d[i].lo();
      } else {
        all_exact = false;
      }
    }
    out.quality = pb.norm2.eval(d, bits);
    if (all_exact) {
      switch (pb.norm2.kind()) {
        case NormKind::Max:
          out.exact_key = *std::max_element(dq.begin(), dq.end());
          break;
        case NormKind::WeightedMax:
          out.exact_key = out.quality.lo();
          break;
        case NormKind::P:
          if (pb.norm2.p_value().get_den() == 1) {
            unsigned long p = pb.norm2.p_value().get_num().get_ui();
            Rational s(0);
            for (const auto& x : dq) s += pow_q(x, p);
            out.exact_key = s;
          }
          break;
        case NormKind::Custom:
          break;
      }
    }
    return out;
  }

  // General norm: the optimal b̃ lies within equiv_hi/(2 equiv_lo) of -y in max norm.
  Rational radius = pb.norm2.equiv_hi() / (2 * pb.norm2.equiv_lo());
  std::vector<std::vector<Integer>> options(pb.m);
  for (size_t i = 0; i < pb.m; ++i) {
    Integer lo = ceil_q(-y[i].hi() - radius), hi = floor_q(-y[i].lo() + radius);
    for (Integer z = lo; z <= hi; ++z) options[i].push_back(z);
    if (options[i].empty()) options[i].push_back(-floor_q(y[i].midpoint() + half));
  }
  std::vector<size_t> idx(pb.m, 0);
  bool first = true;
  IntervalReal best;
  IntVector best_z;
  std::optional<Rational> best_key;
  bool tie_unresolved = false;
  IntervalReal env;
  for (;;) {
    std::vector<IntervalReal> v(pb.m);
    IntVector z(pb.m);
    bool exact = true;
    for (size_t i = 0; i < pb.m; ++i) {
      z[i] = options[i][idx[i]];
      v[i] = y[i] + IntervalReal(to_q(z[i]));
      if (!yq[i]) exact = false;
    }
    IntervalReal val = pb.norm2.eval(v, bits);
    std::optional<Rational> key;
    if (exact && pb.norm2.functional_spec()) key = val.lo();
    if (first) {
      best = val;
      best_z = z;
      best_key = key;
      env = val;
      first = false;
    } else {
      env = imin(env, val);
      Ordering o = cmp_certified(val, best);
      bool equal = key && best_key && *key == *best_key;
      bool less = (key && best_key) ? *key < *best_key : o == Ordering::Less;
      if (less) {
        best = val;
        best_z = z;
        best_key = key;
        tie_unresolved = false;
      } else if (equal) {
        if (lex_less(z, best_z)) best_z = z;
      } else if (o == Ordering::Overlap && !(key && best_key)) {
        tie_unresolved = true;
      }
    }
    size_t i = 0;
    while (i < pb.m && ++idx[i] == options[i].size()) idx[i++] = 0;
    if (i == pb.m) break;
  }
  out.quality = tie_unresolved ? env : best;
  out.b_tilde = best_z;
  out.resolved = !tie_unresolved;
  out.exact_key = tie_unresolved ? std::nullopt : best_key;
  return out;
}

IntervalReal height_of(const ApproxProblem& pb, const IntVector& b_hat, long bits) {
  std::vector<Rational> v;
  for (const auto& x : b_hat) v.push_back(to_q(x));
  return pb.norm1.eval(v, bits);
}

std::vector<ApproxRecord> best_approx_sequence(const ApproxProblem& pb, const Rational& height_cap,
                                               const EnumConfig& cfg) {
  if (height_cap < 1) throw std::invalid_argument("height_cap must be >= 1");
  if (pb.max_max()) {
    Integer Rz = floor_q(height_cap);
    if (bit_length(Rz) > 40) throw BudgetExceeded("height cap beyond enumeration range");
    int64_t R = Rz.get_si();
    check_budget(detail::canonical_points(pb.n, static_cast<long double>(R)), cfg);
    if (auto setup = detail::make_setup(pb, R)) return sequence_fast(pb, R, *setup, cfg);
  }
  return sequence_generic(pb, height_cap, cfg);
}

std::optional<IntervalReal> psi_from_records(const std::vector<ApproxRecord>& records, const Rational& t) {
  std::optional<IntervalReal> out;
  for (const auto& r : records) {
    if (r.height.hi() <= t) {
      out = r.quality;
    } else if (r.height.lo() <= t) {
      throw CertificationFailure("record height overlaps t");
    } else {
      break;
    }
  }
  return out;
}

IntervalReal psi(const ApproxProblem& pb, const Rational& t, const Rational& width, const EnumConfig& cfg) {
  if (width <= 0) throw std::invalid_argument("width must be positive");
  if (t < pb.norm1.equiv_lo()) throw std::invalid_argument("empty height range");
  auto records = best_approx_sequence(pb, t, cfg);
  if (records.empty()) throw std::invalid_argument("empty height range");
  const ApproxRecord& last = records.back();
  IntervalReal q = last.quality;
  long bits = std::max(64L, width_bits(width) + 8);
  while (q.width() > width) {
    if (bits > cfg.max_bits) throw CertificationFailure("psi refinement budget exhausted");
    q = evaluate_quality(pb, last.b_hat, bits).quality;
    bits *= 2;
  }
  return q;
}

StructuralResult extend_structural(const ApproxProblem& pb, std::vector<ApproxRecord> exhaustive,
                                   const Rational& exhaustive_cap, const std::vector<IntVector>& candidates,
                                   const EnumConfig& cfg) {
  StructuralResult res;
  Frontier frontier(pb, cfg);
  for (const auto& r : exhaustive) frontier.insert(from_record(pb, r));
  Rational cap_key = threshold_key(pb.norm1, exhaustive_cap);

  std::vector<IntVector> cands;
  for (auto b : candidates) {
    if (b.size() != pb.n) throw DimensionMismatch("candidate length must equal n");
    if (std::all_of(b.begin(), b.end(), [](const Integer& x) { return x == 0; })) continue;
    normalize_sign_last_positive(b);
    cands.push_back(std::move(b));
  }
  std::sort(cands.begin(), cands.end(), lex_less);
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  std::vector<Candidate> pending;
  for (auto& b : cands) {
    Candidate c;
    c.b_hat = b;
    c.hkey = height_key(pb.norm1, b);
    c.height = height_of(pb, b, initial_bits(b));
    c.bits = initial_bits(b);
    c.certified = false;
    bool above = c.hkey ? *c.hkey > cap_key : c.height.lo() > exhaustive_cap;
    if (above) pending.push_back(std::move(c));
  }
  std::stable_sort(pending.begin(), pending.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.hkey && b.hkey) return *a.hkey < *b.hkey;
    return a.height.midpoint() < b.height.midpoint();
  });
  for (auto& c : pending) {
    try {
      c.qe = evaluate_quality(pb, c.b_hat, c.bits);
      frontier.insert(c);
      ++res.candidates_used;
    } catch (const InsufficientLevels&) {
      res.truncated = true;
      break;
    } catch (const CertificationFailure&) {
      res.truncated = true;
      break;
    }
  }
  try {
    res.records = to_records(pb, frontier.items(), cfg);
  } catch (const InsufficientLevels&) {
    // Drop trailing records that cannot be resolved at the available depth.
    auto& items = frontier.items();
    while (!items.empty()) {
      items.pop_back();
      res.truncated = true;
      try {
        res.records = to_records(pb, items, cfg);
        break;
      } catch (const InsufficientLevels&) {
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

int RootBound::compare(const Rational& x) const {
  if (coeff <= 0 || radicand < 0) throw std::invalid_argument("root bound needs positive coefficient");
  if (x < 0) return -1;
  Rational lhs = pow_q(x, index);
  Rational rhs = pow_q(coeff, index) * radicand;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

IntervalReal RootBound::enclose(long bits) const {
  IntervalReal r = index == 1 ? IntervalReal(radicand)
                              : pow_enclosure(IntervalReal(radicand), Rational(1, index), bits + 8);
  return IntervalReal(coeff) * r;
}

Integer RootBound::floor() const {
  Integer n = floor_q(enclose(64).lo());
  if (n < 0) n = 0;
  while (compare(to_q(n + 1)) <= 0) ++n;
  while (n > 0 && compare(to_q(n)) > 0) --n;
  return n;
}

namespace {

// Certified verdict of quality (<= or <) A for a candidate.
bool within_bound(const ApproxProblem& pb, Candidate& c, const RootBound& A, Boundary boundary,
                  const EnumConfig& cfg) {
  for (;;) {
    if (c.qe.quality.is_point()) {
      int s = A.compare(c.qe.quality.lo());
      return boundary == Boundary::Strict ? s < 0 : s <= 0;
    }
    IntervalReal a = A.enclose(c.bits);
    Ordering o = cmp_certified(c.qe.quality, a);
    if (o == Ordering::Less) return true;
    if (o == Ordering::Greater) return false;
    refine(pb, c, cfg);
  }
}

}  // namespace

BoxResult dirichlet_box_nonempty(const ApproxProblem& problem, const RootBound& A, const RootBound& B,
                                 Boundary boundary, const EnumConfig& cfg) {
  if (A.coeff < 0 || B.coeff <= 0) throw std::invalid_argument("box bounds must be positive");
  ApproxProblem pb = ApproxProblem::with_max_norms(problem.omega);
  Integer Bz = B.floor();
  if (bit_length(Bz) > 40) throw BudgetExceeded("box height beyond enumeration range");
  int64_t R = Bz.get_si();
  check_budget(detail::canonical_points(pb.n, static_cast<long double>(R)), cfg);
  auto setup = R >= 1 ? detail::make_setup(pb, R) : std::nullopt;
  for (int64_t h = 1; h <= R; ++h) {
    std::vector<IntVector> hits;
    if (setup) {
      Rational a_units = A.enclose(64).hi() * detail::to_rational(setup->D);
      detail::i128 thr = static_cast<detail::i128>(floor_q(a_units).get_si()) + 1;
      if (bit_length(floor_q(a_units)) > 62) thr = setup->D;
      for (const auto& c : detail::scan_shell(*setup, h, thr)) hits.push_back(to_int_vector(c.b, pb.n));
    } else {
      std::vector<int64_t> b(pb.n, -h);
      for (;;) {
        int64_t mx = 0;
        int lastsign = 0;
        for (auto v : b) {
          mx = std::max<int64_t>(mx, v < 0 ? -v : v);
          if (v != 0) lastsign = v > 0 ? 1 : -1;
        }
        if (mx == h && lastsign > 0) {
          IntVector bv(pb.n);
          for (size_t j = 0; j < pb.n; ++j) bv[j] = Integer(static_cast<long>(b[j]));
          hits.push_back(std::move(bv));
        }
        size_t j = 0;
        while (j < pb.n && b[j] == h) b[j++] = -h;
        if (j == pb.n) break;
        ++b[j];
      }
    }
    std::sort(hits.begin(), hits.end(), lex_less);
    for (auto& b : hits) {
      Candidate c = make_candidate(pb, b, initial_bits(b));
      if (within_bound(pb, c, A, boundary, cfg)) {
        ensure_resolved(pb, c, cfg);
        BoxResult res{true, b};
        res.b.insert(res.b.end(), c.qe.b_tilde.begin(), c.qe.b_tilde.end());
        return res;
      }
    }
  }
  // ẑ = 0 requires a nonzero integer z̃ with max |z̃_j| within A.
  int s = A.compare(Rational(1));
  if (boundary == Boundary::Strict ? s < 0 : s <= 0) {
    BoxResult res{true, IntVector(pb.n + pb.m, Integer(0))};
    res.b[pb.n] = 1;
    return res;
  }
  return BoxResult{};
}

BoxResult dirichlet_box_nonempty(const ApproxProblem& problem, const Rational& A, const Rational& B,
                                 Boundary boundary, const EnumConfig& cfg) {
  if (A < 0 || B <= 0) throw std::invalid_argument("box bounds must be positive");
  return dirichlet_box_nonempty(problem, RootBound::of(A), RootBound::of(B), boundary, cfg);
}

RankCheck minkowski_rank_check(const std::vector<ExactReal>& xi, long Q, const Rational& c, const EnumConfig& cfg) {
  if (xi.size() != 2) throw DimensionMismatch("rank check needs two coordinates");
  if (c <= 0 || Q < 1) throw std::invalid_argument("rank check needs c > 0 and Q >= 1");
  check_budget(static_cast<long double>(2 * Q + 1) * (2 * Q + 1), cfg);
  Rational eps = c / (Rational(Q) * Rational(Q));
  RankCheck out;
  IntMatrix basis;
  for (long b1 = -Q; b1 <= Q; ++b1) {
    for (long b2 = -Q; b2 <= Q; ++b2) {
      long bits = 64 + static_cast<long>(bit_length(eps.get_den()));
      for (;;) {
        IntervalReal v = xi[0].eval_bits(bits + 8) * IntervalReal(Rational(b1)) +
                         xi[1].eval_bits(bits + 8) * IntervalReal(Rational(b2));
        Integer lo = ceil_q(-v.hi() - eps), hi = floor_q(-v.lo() + eps);
        bool undecided = false;
        std::vector<Integer> sols;
        for (Integer b3 = lo; b3 <= hi; ++b3) {
          if (b1 == 0 && b2 == 0 && b3 == 0) continue;
          IntervalReal w = v + IntervalReal(to_q(b3));
          if (w.mag() < eps) {
            sols.push_back(b3);
          } else if (w.mig() < eps) {
            undecided = true;
          }
        }
        if (undecided) {
          if (bits >= cfg.max_bits) throw CertificationFailure("rank check could not certify a candidate");
          bits *= 2;
          continue;
        }
        for (const auto& b3 : sols) {
          ++out.solutions;
          IntVector sol{Integer(b1), Integer(b2), b3};
          IntMatrix trial = basis;
          trial.push_back(sol);
          if (basis.size() < 3 && integer_rank(trial) > basis.size()) {
            basis = std::move(trial);
            out.witnesses.push_back(sol);
          }
        }
        break;
      }
    }
  }
  out.three_independent = basis.size() == 3;
  if (!out.three_independent) out.witnesses.clear();
  return out;
}

}  // namespace dlab
