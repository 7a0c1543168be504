#include "dlab/normspace.hpp"

#include <algorithm>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/prng.hpp"
#include "dlab/real.hpp"

namespace dlab {

namespace {

Rational max_abs(const std::vector<Rational>& v) {
  Rational m(0);
  for (const auto& x : v) m = std::max(m, abs_q(x));
  return m;
}

std::vector<std::vector<Rational>> vertices(size_t dim) {
  if (dim > 16) throw std::invalid_argument("vertex enumeration limited to dimension 16");
  std::vector<std::vector<Rational>> out;
  for (uint64_t mask = 0; mask < (uint64_t{1} << dim); ++mask) {
    std::vector<Rational> v(dim);
    for (size_t i = 0; i < dim; ++i) v[i] = (mask >> i & 1) ? -1 : 1;
    out.push_back(std::move(v));
  }
  return out;
}

IntervalReal eval_functionals(const LinearFunctionalNorm& spec, const std::vector<IntervalReal>& v) {
  IntervalReal acc(0);
  for (const auto& f : spec.functionals) {
    IntervalReal dot(0);
    for (size_t i = 0; i < f.size(); ++i) dot += IntervalReal(f[i]) * v[i];
    dot = dot.abs();
    acc = spec.outer == LinearFunctionalNorm::Outer::Max ? imax(acc, dot) : acc + dot;
  }
  return acc;
}

void validate_constants(const NormDescriptor& norm) {
  if (norm.equiv_lo() <= 0 || norm.equiv_hi() < norm.equiv_lo()) {
    throw std::invalid_argument("equivalence constants must satisfy 0 < lo <= hi");
  }
  std::vector<std::vector<Rational>> probes;
  size_t d = norm.dimension();
  for (size_t i = 0; i < d; ++i) {
    std::vector<Rational> e(d, Rational(0));
    e[i] = 1;
    probes.push_back(e);
  }
  if (d <= 12) {
    auto vs = vertices(d);
    probes.insert(probes.end(), vs.begin(), vs.end());
  }
  CounterRng rng(0x6E6F726D, d);
  uint64_t ctr = 0;
  for (int s = 0; s < 64; ++s) {
    std::vector<Rational> x(d);
    for (auto& xi : x) xi = ratio(static_cast<long>(rng.uniform(33, ctr)) - 16, static_cast<long>(1 + rng.uniform(8, ctr)));
    if (max_abs(x) != 0) probes.push_back(std::move(x));
  }
  for (const auto& x : probes) {
    IntervalReal val = norm.eval(x, 64);
    Rational inf = max_abs(x);
    if (val.hi() < norm.equiv_lo() * inf || val.lo() > norm.equiv_hi() * inf) {
      throw std::invalid_argument("declared equivalence constants violated by custom norm '" + norm.name() + "'");
    }
  }
}

}  // namespace

NormDescriptor NormDescriptor::max(size_t dim) {
  if (dim == 0) throw std::invalid_argument("norm dimension must be positive");
  NormDescriptor n;
  n.dim_ = dim;
  n.kind_ = NormKind::Max;
  n.name_ = "max";
  return n;
}

NormDescriptor NormDescriptor::p(size_t dim, const Rational& p) {
  if (dim == 0) throw std::invalid_argument("norm dimension must be positive");
  if (p < 1) throw std::invalid_argument("p-norm needs p >= 1");
  NormDescriptor n;
  n.dim_ = dim;
  n.kind_ = NormKind::P;
  n.p_ = p;
  n.equiv_lo_ = 1;
  n.equiv_hi_ = pow_enclosure(IntervalReal(Rational(static_cast<long>(dim))), Rational(1 / p), 64).hi();
  n.name_ = "p=" + to_string(p);
  return n;
}

NormDescriptor NormDescriptor::weighted_max(std::vector<Rational> weights) {
  if (weights.empty()) throw std::invalid_argument("norm dimension must be positive");
  for (const auto& w : weights) {
    if (w <= 0) throw std::invalid_argument("weights must be positive");
  }
  NormDescriptor n;
  n.dim_ = weights.size();
  n.kind_ = NormKind::WeightedMax;
  n.equiv_lo_ = *std::min_element(weights.begin(), weights.end());
  n.equiv_hi_ = *std::max_element(weights.begin(), weights.end());
  n.weights_ = std::move(weights);
  n.name_ = "wmax";
  return n;
}

NormDescriptor NormDescriptor::custom(size_t dim, CustomEvaluator eval, const Rational& equiv_lo,
                                      const Rational& equiv_hi, std::string name) {
  if (dim == 0) throw std::invalid_argument("norm dimension must be positive");
  if (!eval) throw std::invalid_argument("custom norm needs an evaluator");
  NormDescriptor n;
  n.dim_ = dim;
  n.kind_ = NormKind::Custom;
  n.custom_ = std::move(eval);
  n.equiv_lo_ = equiv_lo;
  n.equiv_hi_ = equiv_hi;
  n.name_ = std::move(name);
  validate_constants(n);
  return n;
}

NormDescriptor NormDescriptor::linear_functionals(size_t dim, LinearFunctionalNorm spec, const Rational& equiv_lo,
                                                  const Rational& equiv_hi) {
  if (spec.functionals.empty()) throw std::invalid_argument("custom norm needs at least one functional");
  for (const auto& f : spec.functionals) {
    if (f.size() != dim) throw DimensionMismatch("functional length differs from norm dimension");
  }
  auto evaluator = [spec](const std::vector<Rational>& x, long) {
    std::vector<IntervalReal> iv(x.begin(), x.end());
    return eval_functionals(spec, iv);
  };
  NormDescriptor n = custom(dim, evaluator, equiv_lo, equiv_hi,
                            spec.outer == LinearFunctionalNorm::Outer::Max ? "max-of-forms" : "sum-of-forms");
  n.functional_ = std::move(spec);
  return n;
}

IntervalReal NormDescriptor::eval_point(const std::vector<Rational>& v, long bits) const {
  switch (kind_) {
    case NormKind::Max:
      return IntervalReal(max_abs(v));
    case NormKind::WeightedMax: {
      Rational m(0);
      for (size_t i = 0; i < v.size(); ++i) m = std::max(m, Rational(weights_[i] * abs_q(v[i])));
      return IntervalReal(m);
    }
    case NormKind::P: {
      if (p_ == 1) {
        Rational s(0);
        for (const auto& x : v) s += abs_q(x);
        return IntervalReal(s);
      }
      Rational inf = max_abs(v);
      if (inf == 0) return IntervalReal(0);
      long prec = bits + static_cast<long>(bit_length(ceil_q(inf) + 1)) + 8;
      IntervalReal s(0);
      for (const auto& x : v) {
        if (x != 0) s += pow_enclosure(IntervalReal(abs_q(x)), p_, prec + 8);
      }
      IntervalReal r = p_ == 2 ? sqrt_enclosure(s, prec) : pow_enclosure(s, Rational(1 / p_), prec);
      return IntervalReal(std::max(r.lo(), inf), r.hi());
    }
    case NormKind::Custom:
      return custom_(v, bits);
  }
  throw std::logic_error("unknown norm kind");
}

IntervalReal NormDescriptor::eval(const std::vector<Rational>& v, long bits) const {
  if (v.size() != dim_) throw DimensionMismatch("vector length differs from norm dimension");
  return eval_point(v, bits);
}

IntervalReal NormDescriptor::eval(const std::vector<IntervalReal>& v, long bits) const {
  if (v.size() != dim_) throw DimensionMismatch("vector length differs from norm dimension");
  bool points = std::all_of(v.begin(), v.end(), [](const IntervalReal& x) { return x.is_point(); });
  std::vector<Rational> mid(dim_);
  for (size_t i = 0; i < dim_; ++i) mid[i] = v[i].midpoint();
  if (points) return eval_point(mid, bits);
  if (is_monotone()) {
    std::vector<Rational> lo(dim_), hi(dim_);
    for (size_t i = 0; i < dim_; ++i) {
      lo[i] = v[i].mig();
      hi[i] = v[i].mag();
    }
    return IntervalReal(eval_point(lo, bits).lo(), eval_point(hi, bits).hi());
  }
  if (functional_) return eval_functionals(*functional_, v);
  Rational r(0);
  for (const auto& x : v) r = std::max(r, x.radius());
  IntervalReal c = eval_point(mid, bits);
  Rational spread = equiv_hi_ * r;
  return IntervalReal(std::max(Rational(0), Rational(c.lo() - spread)), c.hi() + spread);
}

IntervalReal eval_norm(const NormDescriptor& norm, const std::vector<IntervalReal>& v, const Rational& width) {
  long bits = width_bits(width) + 2;
  for (;;) {
    IntervalReal r = norm.eval(v, bits);
    if (r.width() <= width || bits > 1 << 16) return r;
    bits *= 2;
  }
}

NormDescriptor project_norm(const NormDescriptor& norm, const std::vector<size_t>& coords) {
  if (coords.empty()) throw std::invalid_argument("projection needs at least one coordinate");
  std::vector<size_t> sorted = coords;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= norm.dimension()) {
    throw std::invalid_argument("projection coordinates must be distinct and in range");
  }
  size_t k = coords.size();
  switch (norm.kind()) {
    case NormKind::Max:
      return NormDescriptor::max(k);
    case NormKind::P:
      return NormDescriptor::p(k, norm.p_value());
    case NormKind::WeightedMax: {
      std::vector<Rational> w;
      for (size_t c : coords) w.push_back(norm.weights()[c]);
      return NormDescriptor::weighted_max(std::move(w));
    }
    case NormKind::Custom:
      break;
  }
  size_t d = norm.dimension();
  NormDescriptor out;
  out.dim_ = k;
  out.kind_ = NormKind::Custom;
  out.name_ = norm.name() + "|proj";
  out.custom_ = [parent = norm, coords, d](const std::vector<Rational>& x, long bits) {
    std::vector<Rational> padded(d, Rational(0));
    for (size_t i = 0; i < coords.size(); ++i) padded[coords[i]] = x[i];
    return parent.eval(padded, bits);
  };
  if (norm.functional_spec()) {
    LinearFunctionalNorm spec;
    spec.outer = norm.functional_spec()->outer;
    for (const auto& f : norm.functional_spec()->functionals) {
      std::vector<Rational> g;
      for (size_t c : coords) g.push_back(f[c]);
      spec.functionals.push_back(std::move(g));
    }
    out.functional_ = std::move(spec);
  }
  if (k == 1) {
    IntervalReal e = out.custom_({Rational(1)}, 128);
    out.equiv_lo_ = e.lo();
    out.equiv_hi_ = e.hi();
  } else {
    out.equiv_lo_ = norm.equiv_lo();
    out.equiv_hi_ = std::min(norm.equiv_hi(), max_over_vertices(out, 128).hi());
  }
  return out;
}

IntervalReal max_over_vertices(const NormDescriptor& norm, long bits) {
  IntervalReal best(0);
  for (const auto& v : vertices(norm.dimension())) best = imax(best, norm.eval(v, bits));
  return best;
}

ExpandingReport is_expanding(const NormDescriptor& norm, size_t samples, uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  ExpandingReport rep;
  rep.closed_form = norm.kind() != NormKind::Custom;
  size_t d = norm.dimension();
  std::vector<std::vector<Rational>> probes;
  for (size_t i = 0; i < d; ++i) {
    std::vector<Rational> e(d, Rational(0));
    e[i] = 1;
    probes.push_back(e);
  }
  if (d <= 12) {
    auto vs = vertices(d);
    probes.insert(probes.end(), vs.begin(), vs.end());
  }
  CounterRng rng(seed, 0x657870);
  uint64_t ctr = 0;
  for (size_t s = 0; s < samples; ++s) {
    std::vector<Rational> x(d);
    for (auto& xi : x) xi = ratio(static_cast<long>(rng.uniform(65, ctr)) - 32, static_cast<long>(1 + rng.uniform(16, ctr)));
    probes.push_back(std::move(x));
  }
  for (const auto& x : probes) {
    IntervalReal full = norm.eval(x, 96);
    for (size_t j = 0; j < d; ++j) {
      std::vector<Rational> pj(d, Rational(0));
      pj[j] = x[j];
      IntervalReal part = norm.eval(pj, 96);
      if (cmp_certified(full, part) == Ordering::Less) {
        rep.verdict = ExpandingReport::Verdict::CounterexampleFound;
        rep.counterexample = x;
        rep.coordinate = j;
        return rep;
      }
    }
    ++rep.samples_checked;
  }
  return rep;
}

NormConstants norm_constants(const NormDescriptor& norm_a, const NormDescriptor& norm_b) {
  size_t d = norm_a.dimension();
  std::vector<Rational> e1(d, Rational(0));
  e1[0] = 1;
  NormConstants nc;
  nc.d1 = norm_a.eval(e1, 128);
  if (d >= 2) {
    std::vector<Rational> e2(d, Rational(0));
    e2[1] = 1;
    nc.d2 = norm_a.eval(e2, 128);
  } else {
    nc.d2 = nc.d1;
  }
  nc.gamma_allones = max_over_vertices(norm_b, 128);
  nc.gamma_e1_projected = project_norm(norm_a, {0}).eval(std::vector<Rational>{Rational(1)}, 128);
  return nc;
}

std::string describe(const NormDescriptor& norm) {
  return norm.name() + "/" + std::to_string(norm.dimension());
}

}  // namespace dlab
