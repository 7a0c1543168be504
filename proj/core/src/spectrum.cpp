#include "dlab/spectrum.hpp"

#include <algorithm>
#include <stdexcept>

#include "dlab/constants.hpp"
#include "dlab/errors.hpp"
#include "dlab/parallel.hpp"
#include "dlab/real.hpp"
#include "kernel.hpp"

namespace dlab {

namespace {

IntervalReal power(const IntervalReal& x, const Rational& e, long bits) {
  if (e.get_den() == 1 && e >= 0) return x.pow(e.get_num().get_ui());
  return pow_enclosure(x, e, bits);
}

IntVector concat(const IntVector& a, const IntVector& b) {
  IntVector r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

IntVector negate(IntVector v) {
  for (auto& x : v) x = -x;
  return v;
}

IntVector combine(const IntVector& a, const IntVector& b, int sign) {
  IntVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + sign * b[i];
  return r;
}

// Refines the record's quality until it is separated from x, or throws.
int compare_refined(const ApproxProblem& pb, const ApproxRecord& rec, IntervalReal q, const IntervalReal& x,
                    const EnumConfig& cfg) {
  long bits = 128;
  for (;;) {
    switch (cmp_certified(q, x)) {
      case Ordering::Less:
        return -1;
      case Ordering::Greater:
        return 1;
      case Ordering::Overlap:
        break;
    }
    if (q.is_point() && x.is_point()) return 0;
    if (bits > cfg.max_bits) throw CertificationFailure("cannot separate psi from the threshold");
    q = evaluate_quality(pb, rec.b_hat, bits).quality;
    bits *= 2;
  }
}

}  // namespace

SpectrumEstimate theta_estimate(const std::vector<ApproxRecord>& seq_in, const Rational& e, const ThetaOptions& opt) {
  if (seq_in.empty()) throw std::invalid_argument("theta_estimate needs a nonempty sequence");
  std::vector<ApproxRecord> seq;
  for (const auto& r : seq_in) {
    if (!r.certified && !opt.include_uncertified) break;
    seq.push_back(r);
  }
  SpectrumEstimate out;
  out.exponent = e;
  if (seq.size() < seq_in.size()) out.notes.push_back("uncertified records excluded");
  const size_t V = seq.size();
  for (size_t v = 1; v <= V; ++v) {
    const auto& r = seq[v - 1];
    ThetaRow row;
    row.v = v;
    row.height = r.height;
    row.quality = r.quality;
    row.certified = r.certified;
    row.inf_term = r.quality * power(r.height, e, opt.bits);
    if (v < V) {
      row.next_height = seq[v].height;
      row.sup_term = r.quality * power(seq[v].height, e, opt.bits);
    }
    out.rows.push_back(std::move(row));
  }
  out.terminal = seq.back().quality.is_point() && seq.back().quality.lo() == 0;
  if (out.terminal) out.notes.push_back("terminal record with L = 0: psi vanishes beyond it");
  size_t vmax_default = V > 1 ? V - 1 : 1;
  out.v_min = std::max<size_t>(1, opt.v_min.value_or(1));
  out.v_max = std::min(opt.v_max.value_or(vmax_default), vmax_default);
  if (out.v_min > out.v_max) throw std::invalid_argument("empty theta window");
  bool first = true;
  std::vector<IntervalReal> sups;
  for (size_t v = out.v_min; v <= out.v_max; ++v) {
    const auto& row = out.rows[v - 1];
    out.theta_inf = first ? row.inf_term : imin(out.theta_inf, row.inf_term);
    if (row.sup_term) {
      out.theta_sup = sups.empty() ? *row.sup_term : imax(out.theta_sup, *row.sup_term);
      sups.push_back(out.theta_sup);
    }
    first = false;
  }
  if (sups.size() >= 3) {
    Rational lo = sups[sups.size() - 1].midpoint(), hi = lo;
    for (size_t i = sups.size() - 3; i < sups.size(); ++i) {
      lo = std::min(lo, sups[i].midpoint());
      hi = std::max(hi, sups[i].midpoint());
    }
    out.converged = hi > 0 && (hi - lo) <= opt.rel_tol * hi;
  }
  if (!out.converged) out.notes.push_back("not converged at this depth");
  return out;
}

GridCheck tT_grid_check(const std::vector<ApproxRecord>& seq, const Rational& e, long per_unit) {
  if (seq.size() < 2 || per_unit < 1) throw std::invalid_argument("grid check needs two records");
  for (const auto& r : seq) {
    if (!r.height.is_point()) throw std::invalid_argument("grid check needs exact heights");
  }
  GridCheck out;
  const long bits = 96;
  bool first = true;
  for (size_t v = 0; v + 1 < seq.size(); ++v) {
    IntervalReal next = seq[v + 1].height;
    IntervalReal jump = seq[v].quality * power(next, e, bits);
    IntervalReal shifted = seq[v].quality * power(next - IntervalReal(Rational(1, per_unit)), e, bits);
    out.jump_max = first ? jump : imax(out.jump_max, jump);
    out.jump_max_shifted = first ? shifted : imax(out.jump_max_shifted, shifted);
    first = false;
  }
  const Rational start = seq.front().height.lo(), stop = seq.back().height.lo();
  first = true;
  for (Rational t = start; t < stop; t += Rational(1, per_unit)) {
    auto q = psi_from_records(seq, t);
    if (!q) continue;
    IntervalReal val = power(IntervalReal(t), e, bits) * *q;
    out.grid_max = first ? val : imax(out.grid_max, val);
    first = false;
    ++out.points;
  }
  out.consistent = out.grid_max.hi() <= out.jump_max.hi() && out.grid_max.lo() >= out.jump_max_shifted.lo();
  return out;
}

ClassificationReport classify_records(const std::vector<NamedForm>& forms, const std::vector<ApproxRecord>& seq,
                                      const NormDescriptor& norm1) {
  ClassificationReport out;
  const size_t n = norm1.dimension();
  for (const auto& f : forms) {
    if (!seq.empty() && f.b.size() != seq.front().b_hat.size() + seq.front().b_tilde.size()) {
      throw std::invalid_argument("mismatched provenance: record and form dimensions differ");
    }
  }
  for (const auto& r : seq) {
    RecordVerdict rv;
    rv.v = r.index;
    rv.height = r.height;
    rv.certified = r.certified;
    rv.form = "Other";
    IntVector b = concat(r.b_hat, r.b_tilde);
    IntVector nb = negate(b);
    for (const auto& f : forms) {
      if (f.b == b || f.b == nb) {
        rv.form = f.name;
        rv.j = f.j;
        rv.sign = f.b == b ? 1 : -1;
        break;
      }
    }
    if (rv.form == "Other") ++out.others;
    out.verdicts.push_back(std::move(rv));
  }
  // Level heights ‖v̂_j‖ in increasing j.
  std::vector<std::pair<size_t, IntervalReal>> levels;
  for (const auto& f : forms) {
    if (f.name != "v_" + std::to_string(f.j)) continue;
    std::vector<Rational> bh(f.b.begin(), f.b.begin() + static_cast<long>(n));
    levels.emplace_back(f.j, norm1.eval(bh, 96));
  }
  std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [j, h] : levels) {
    bool all = true;
    for (const auto& rv : out.verdicts) {
      if (rv.form == "Other" && rv.height.hi() >= h.lo()) all = false;
    }
    if (all) {
      out.threshold_level = j;
      out.threshold_height = h;
      break;
    }
  }
  if (out.threshold_height) {
    for (const auto& rv : out.verdicts) {
      if (rv.form == "Other" && rv.height.lo() >= out.threshold_height->lo()) ++out.others_above_threshold;
    }
  }
  return out;
}

ClassificationReport classify_records(const PrimePowerState& s, const std::vector<ApproxRecord>& seq) {
  NormDescriptor norm = s.params.norm1 ? *s.params.norm1 : NormDescriptor::max(2);
  return classify_records(six_forms(s), seq, norm);
}

std::vector<NamedForm> six_forms(const SignVariedState& s) {
  const auto& A = s.base.A;
  const auto& B = s.base.B;
  const size_t J = A.size();
  auto v = [&](size_t j) {
    IntVector r{A[j - 1], 0};
    for (size_t k = 0; k < s.m; ++k) r.push_back(-s.F[k][j - 1]);
    return r;
  };
  auto w = [&](size_t j) {
    IntVector r{0, B[j - 1]};
    for (size_t k = 0; k < s.m; ++k) r.push_back(-s.G[k][j - 1]);
    return r;
  };
  std::vector<NamedForm> out;
  for (size_t j = 1; j <= J; ++j) {
    std::string js = std::to_string(j), jn = std::to_string(j + 1);
    out.push_back({"v_" + js, j, v(j)});
    out.push_back({"w_" + js, j, w(j)});
    out.push_back({"v_" + js + "+w_" + js, j, combine(v(j), w(j), 1)});
    out.push_back({"w_" + js + "-v_" + js, j, combine(w(j), v(j), -1)});
    if (j < J) {
      out.push_back({"w_" + js + "+v_" + jn, j, combine(w(j), v(j + 1), 1)});
      out.push_back({"v_" + jn + "-w_" + js, j, combine(v(j + 1), w(j), -1)});
    }
  }
  return out;
}

ClassificationReport classify_records(const SignVariedState& s, const std::vector<ApproxRecord>& seq) {
  NormDescriptor norm = s.base.params.norm1 ? *s.base.params.norm1 : NormDescriptor::max(2);
  return classify_records(six_forms(s), seq, norm);
}

MembershipReport membership_probe(const ApproxProblem& pb, const Rational& c, const std::vector<Rational>& heights,
                                  const EnumConfig& cfg) {
  if (heights.empty()) throw std::invalid_argument("membership probe needs heights");
  for (size_t i = 1; i < heights.size(); ++i) {
    if (!(heights[i - 1] < heights[i])) throw std::invalid_argument("heights must be increasing");
  }
  MembershipReport out;
  const Rational e = ratio(static_cast<long>(pb.n), static_cast<long>(pb.m));
  auto records = best_approx_sequence(pb, std::max(Rational(1), heights.back()), cfg);
  bool first = true;
  for (const auto& t : heights) {
    auto q = psi_from_records(records, t);
    if (!q) continue;
    const ApproxRecord* rec = nullptr;
    for (const auto& r : records) {
      if (r.height.hi() <= t) rec = &r;
    }
    IntervalReal tp = power(IntervalReal(t), e, 128);
    // ψ(t) vs c·t^{-e}  ⇔  t^e ψ(t) vs c.
    IntervalReal threshold = IntervalReal(c) / tp;
    int s = compare_refined(pb, *rec, *q, threshold, cfg);
    IntervalReal val = tp * *q;
    out.heights.push_back(t);
    out.normalized.push_back(val);
    if (s <= 0) {
      out.di_witness_heights.push_back(t);
    } else {
      out.sing_violation_heights.push_back(t);
    }
    out.bad_lower_bound = first ? val : imin(out.bad_lower_bound, val);
    first = false;
  }
  return out;
}

SurvivalOutcome survives(const RealMatrix& base, const std::vector<ApproxRecord>& base_records, size_t v,
                         const RealMatrix& extension, const EnumConfig& cfg) {
  if (v < 1 || v + 1 > base_records.size()) throw std::invalid_argument("level v outside the computed sequence");
  if (base.empty() || base.front().size() != 2) throw DimensionMismatch("base must be m x 2");
  ApproxProblem basepb = ApproxProblem::with_max_norms(base);
  RealMatrix zeta = extend_columns(base, extension).result;
  ApproxProblem pb = ApproxProblem::with_max_norms(zeta);
  const ApproxRecord& rec = base_records[v - 1];
  const Rational Mnext = base_records[v].height.hi();
  const Rational T = Mnext - Rational(1, 2);
  const int64_t R = floor_q(T).get_si();
  if (detail::canonical_points(pb.n, static_cast<long double>(R)) > static_cast<long double>(cfg.budget)) {
    throw BudgetExceeded("survival box exceeds the budget");
  }
  IntVector embedded = rec.b_hat;
  embedded.resize(pb.n, Integer(0));
  auto setup = detail::make_setup(pb, R);
  if (!setup) throw std::invalid_argument("survival check needs m, n <= 8");
  IntervalReal Lv = evaluate_quality(basepb, rec.b_hat, 128).quality;
  SurvivalOutcome out;
  for (int64_t h = 1; h <= R; ++h) {
    Rational units = Lv.hi() * detail::to_rational(setup->D);
    detail::i128 thr = static_cast<detail::i128>(floor_q(units).get_si()) + 1;
    for (const auto& c : detail::scan_shell(*setup, h, thr)) {
      IntVector b(pb.n);
      for (size_t j = 0; j < pb.n; ++j) b[j] = Integer(static_cast<long>(c.b[j]));
      if (b == embedded) continue;
      long bits = 128;
      for (;;) {
        IntervalReal q = evaluate_quality(pb, b, bits).quality;
        IntervalReal l = evaluate_quality(basepb, rec.b_hat, bits).quality;
        Ordering o = cmp_certified(q, l);
        if (o == Ordering::Less) {
          out.better = b;
          return out;
        }
        if (o == Ordering::Greater) break;
        if (bits >= cfg.max_bits) throw CertificationFailure("survival candidate ties with L_v");
        bits *= 2;
      }
    }
  }
  out.survived = true;
  out.embedded_identity = true;
  return out;
}

SurvivalReport survival_sample(const RealMatrix& base, size_t dims, size_t trials, size_t v, uint64_t seed,
                               const EnumConfig& cfg) {
  if (trials < 1 || dims < 1) throw std::invalid_argument("survival sampling needs trials >= 1 and dims >= 1");
  ApproxProblem basepb = ApproxProblem::with_max_norms(base);
  const size_t m = base.size();
  std::vector<ApproxRecord> records;
  for (Rational cap(16);; cap *= 2) {
    records = best_approx_sequence(basepb, cap, cfg);
    if (records.size() >= v + 1) break;
    if (!records.empty() && records.back().quality.is_point() && records.back().quality.lo() == 0) {
      throw std::invalid_argument("base sequence terminates before level v + 1");
    }
  }
  SurvivalReport out;
  out.v = v;
  out.L_v = records[v - 1].quality;
  out.T_v = records[v].height.hi() - Rational(1, 2);
  out.trials = trials;
  out.survived.assign(trials, false);
  std::vector<char> ok(trials, 0), ident(trials, 0);
  EnumConfig inner = cfg;
  inner.threads = 1;
  parallel_for(trials, cfg.threads, [&](size_t i) {
    auto g = sample_extension(m * dims, seed, i);
    RealMatrix ext(m, std::vector<ExactReal>(dims));
    for (size_t k = 0; k < m; ++k) {
      for (size_t d = 0; d < dims; ++d) ext[k][d] = ExactReal(g[k * dims + d]);
    }
    auto r = survives(base, records, v, ext, inner);
    ok[i] = r.survived;
    ident[i] = r.embedded_identity;
  });
  for (size_t i = 0; i < trials; ++i) {
    out.survived[i] = ok[i] != 0;
    out.survivors += ok[i] != 0;
    out.identity_holds += ident[i] != 0;
  }
  const long n = 2 + static_cast<long>(dims);
  if (m == 1 && n >= 4) {
    IntervalReal delta = covering_bound(n, 0, 0, out.L_v, IntervalReal(out.T_v));
    IntervalReal vol = ball_volume(n - 2).decimal;
    IntervalReal f = IntervalReal(1) - delta / vol;
    out.delta = delta;
    out.floor = IntervalReal(std::max(Rational(0), f.lo()), std::max(Rational(0), f.hi()));
  }
  return out;
}

RelationResult integer_relation_probe(const std::vector<ExactReal>& values, long bound, const EnumConfig& cfg) {
  if (bound < 1) throw std::invalid_argument("height bound must be >= 1");
  if (values.empty()) throw std::invalid_argument("no values");
  const size_t k = values.size();
  long double volume = 1;
  for (size_t i = 0; i < k; ++i) volume *= static_cast<long double>(2 * bound + 1);
  if (volume > static_cast<long double>(cfg.budget)) throw BudgetExceeded("relation search exceeds the budget");
  RelationResult out;
  for (long h = 1; h <= bound; ++h) {
    std::vector<long> c(k, -h);
    for (;;) {
      long mx = 0;
      int lastsign = 0;
      for (long x : c) {
        mx = std::max(mx, std::labs(x));
        if (x != 0) lastsign = x > 0 ? 1 : -1;
      }
      if (lastsign > 0) {
        ++out.checked;
        long bits = 64;
        for (;;) {
          IntervalReal s(0);
          bool exact = true;
          Rational sq(0);
          for (size_t i = 0; i < k; ++i) {
            if (c[i] == 0) continue;
            if (auto q = values[i].rational()) {
              sq += *q * c[i];
            } else {
              exact = false;
              s += values[i].eval_bits(bits + 8) * IntervalReal(Rational(c[i]));
            }
          }
          s += IntervalReal(sq);
          Integer lo = ceil_q(-s.hi()), hi = floor_q(-s.lo());
          bool undecided = false;
          for (Integer c0 = std::max(lo, Integer(-h)); c0 <= std::min(hi, Integer(h)); ++c0) {
            if (mx != h && abs(c0) != h) continue;
            IntervalReal val = s + IntervalReal(Rational(c0));
            if (exact || val.is_point()) {
              if (val.lo() == 0) {
                out.found = true;
                for (long x : c) out.coeffs.push_back(Integer(x));
                out.coeffs.push_back(c0);
                return out;
              }
            } else if (val.lo() <= 0 && val.hi() >= 0) {
              undecided = true;
            }
          }
          if (!undecided) break;
          if (bits >= cfg.max_bits) throw CertificationFailure("precision exhausted while certifying nonvanishing");
          bits *= 2;
        }
      }
      size_t j = 0;
      while (j < k && c[j] == h) c[j++] = -h;
      if (j == k) break;
      ++c[j];
    }
  }
  return out;
}

}  // namespace dlab
