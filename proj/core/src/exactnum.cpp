#include "dlab/exactnum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/real.hpp"

namespace dlab {

namespace {

Integer parse_integer(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  std::string buf(s);
  if (buf[0] == '+') buf.erase(0, 1);
  Integer z;
  if (buf.empty() || z.set_str(buf, 10) != 0) {
    throw std::invalid_argument("bad integer literal: " + std::string(s));
  }
  return z;
}

Rational parse_decimal(std::string_view s) {
  auto epos = s.find_first_of("eE");
  std::string_view mant = s.substr(0, epos);
  long exp10 = 0;
  if (epos != std::string_view::npos) {
    exp10 = parse_integer(s.substr(epos + 1)).get_si();
  }
  bool neg = !mant.empty() && mant[0] == '-';
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant.remove_prefix(1);
  auto dot = mant.find('.');
  std::string digits;
  if (dot == std::string_view::npos) {
    digits = std::string(mant);
  } else {
    digits = std::string(mant.substr(0, dot)) + std::string(mant.substr(dot + 1));
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty()) throw std::invalid_argument("bad decimal literal: " + std::string(s));
  Rational q(parse_integer(digits));
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0) {
    q *= ten;
  } else {
    q /= ten;
  }
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational q(parse_integer(text.substr(0, slash)), den);
    q.canonicalize();
    return q;
  }
  if (auto caret = text.find('^'); caret != std::string_view::npos) {
    Integer base = parse_integer(text.substr(0, caret));
    long e = parse_integer(text.substr(caret + 1)).get_si();
    Rational b(base);
    Rational r = pow_q(b, static_cast<unsigned long>(std::labs(e)));
    return e >= 0 ? r : Rational(1 / r);
  }
  if (text.find_first_of(".eE") != std::string_view::npos) return parse_decimal(text);
  return Rational(parse_integer(text));
}

std::string to_string(const Integer& z) { return z.get_str(10); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str(10);
  return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

Integer floor_q(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_q(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational pow2(long exponent) {
  Rational r(1);
  if (exponent >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  return r;
}

Rational ratio(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational pow_q(const Rational& base, unsigned long exponent) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

size_t bit_length(const Integer& z) {
  if (z == 0) return 0;
  return mpz_sizeinbase(z.get_mpz_t(), 2);
}

long width_bits(const Rational& width) {
  if (width <= 0) throw std::invalid_argument("width must be positive");
  if (width >= 1) return 0;
  long k = static_cast<long>(bit_length(width.get_den())) -
           static_cast<long>(bit_length(width.get_num())) - 1;
  k = std::max(k, 0L);
  while (pow2(-k) > width) ++k;
  while (k > 0 && pow2(-(k - 1)) <= width) --k;
  return k;
}

IntervalReal::IntervalReal(const Rational& point) : lo_(point), hi_(point) {}
IntervalReal::IntervalReal(long point) : lo_(point), hi_(point) {}
IntervalReal::IntervalReal(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ > hi_) throw std::invalid_argument("interval with lo > hi");
}

Rational IntervalReal::midpoint() const { return (lo_ + hi_) / 2; }
Rational IntervalReal::radius() const { return (hi_ - lo_) / 2; }
Rational IntervalReal::mag() const { return std::max(abs_q(lo_), abs_q(hi_)); }
Rational IntervalReal::mig() const {
  if (lo_ <= 0 && hi_ >= 0) return 0;
  return std::min(abs_q(lo_), abs_q(hi_));
}

bool IntervalReal::contains(const IntervalReal& other) const {
  return lo_ <= other.lo_ && other.hi_ <= hi_;
}

IntervalReal IntervalReal::operator-() const { return IntervalReal(-hi_, -lo_); }

IntervalReal& IntervalReal::operator+=(const IntervalReal& o) {
  lo_ += o.lo_;
  hi_ += o.hi_;
  return *this;
}

IntervalReal& IntervalReal::operator-=(const IntervalReal& o) {
  lo_ -= o.hi_;
  hi_ -= o.lo_;
  return *this;
}

IntervalReal& IntervalReal::operator*=(const IntervalReal& o) {
  if (is_point() && o.is_point()) {
    lo_ *= o.lo_;
    hi_ = lo_;
    return *this;
  }
  Rational a = lo_ * o.lo_, b = lo_ * o.hi_, c = hi_ * o.lo_, d = hi_ * o.hi_;
  lo_ = std::min({a, b, c, d});
  hi_ = std::max({a, b, c, d});
  return *this;
}

IntervalReal IntervalReal::abs() const {
  if (lo_ >= 0) return *this;
  if (hi_ <= 0) return -*this;
  return IntervalReal(Rational(0), std::max(Rational(-lo_), hi_));
}

IntervalReal IntervalReal::pow(unsigned long k) const {
  if (k == 0) return IntervalReal(1);
  if (k % 2 == 1 || lo_ >= 0) {
    return IntervalReal(pow_q(lo_, k), pow_q(hi_, k));
  }
  if (hi_ <= 0) return IntervalReal(pow_q(hi_, k), pow_q(lo_, k));
  return IntervalReal(Rational(0), pow_q(mag(), k));
}

std::optional<Integer> IntervalReal::floor() const {
  Integer a = floor_q(lo_), b = floor_q(hi_);
  if (a != b) return std::nullopt;
  return a;
}

std::optional<Integer> IntervalReal::ceil() const {
  Integer a = ceil_q(lo_), b = ceil_q(hi_);
  if (a != b) return std::nullopt;
  return a;
}

IntervalReal IntervalReal::round_out(long bits) const {
  Rational scale = pow2(bits);
  Rational lo(floor_q(lo_ * scale), 1), hi(ceil_q(hi_ * scale), 1);
  lo /= scale;
  hi /= scale;
  return IntervalReal(lo, hi);
}

double IntervalReal::approx() const { return midpoint().get_d(); }

IntervalReal operator+(IntervalReal a, const IntervalReal& b) { return a += b; }
IntervalReal operator-(IntervalReal a, const IntervalReal& b) { return a -= b; }
IntervalReal operator*(IntervalReal a, const IntervalReal& b) { return a *= b; }

IntervalReal operator/(const IntervalReal& a, const IntervalReal& b) {
  if (b.lo() <= 0 && b.hi() >= 0) throw std::domain_error("interval division by zero");
  IntervalReal inv(1 / b.hi(), 1 / b.lo());
  return a * inv;
}

Ordering cmp_certified(const IntervalReal& a, const IntervalReal& b) {
  if (a.hi() < b.lo()) return Ordering::Less;
  if (a.lo() > b.hi()) return Ordering::Greater;
  return Ordering::Overlap;
}

IntervalReal hull(const IntervalReal& a, const IntervalReal& b) {
  return IntervalReal(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

IntervalReal imin(const IntervalReal& a, const IntervalReal& b) {
  return IntervalReal(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

IntervalReal imax(const IntervalReal& a, const IntervalReal& b) {
  return IntervalReal(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

std::string to_string(const IntervalReal& x) {
  return "[" + to_string(x.lo()) + ", " + to_string(x.hi()) + "]";
}

// ---------------------------------------------------------------------------
// ExactReal

namespace {

class LiteralGen final : public RealGenerator {
 public:
  explicit LiteralGen(Rational q) : q_(std::move(q)) {}
  IntervalReal enclose(long) const override { return IntervalReal(q_); }
  std::optional<Rational> exact() const override { return q_; }
  std::string describe() const override { return to_string(q_); }

 private:
  Rational q_;
};

class LinearGen final : public RealGenerator {
 public:
  LinearGen(std::vector<std::pair<Rational, ExactReal>> terms, Rational constant)
      : terms_(std::move(terms)), constant_(std::move(constant)) {}

  IntervalReal enclose(long bits) const override {
    IntervalReal acc(constant_);
    long spread = static_cast<long>(bit_length(Integer(terms_.size()))) + 1;
    for (const auto& [k, x] : terms_) {
      Rational mag = abs_q(k);
      long extra = static_cast<long>(bit_length(ceil_q(mag))) + spread;
      acc += IntervalReal(k) * x.eval_bits(bits + extra);
    }
    return acc;
  }

  std::optional<Rational> exact() const override {
    Rational acc = constant_;
    for (const auto& [k, x] : terms_) {
      auto q = x.rational();
      if (!q) return std::nullopt;
      acc += k * *q;
    }
    return acc;
  }

  std::string describe() const override {
    std::string s;
    for (const auto& [k, x] : terms_) {
      if (!s.empty()) s += " + ";
      s += to_string(k) + "*(" + x.describe() + ")";
    }
    if (constant_ != 0 || s.empty()) s += (s.empty() ? "" : " + ") + to_string(constant_);
    return s;
  }

 private:
  std::vector<std::pair<Rational, ExactReal>> terms_;
  Rational constant_;
};

class QuadraticGen final : public RealGenerator {
 public:
  QuadraticGen(Rational a, Rational b, Integer d) : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {
    if (d_ <= 0) throw std::invalid_argument("quadratic irrational needs d > 0");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), d_.get_mpz_t());
    if (r * r == d_) exact_ = a_ + b_ * Rational(r);
  }

  IntervalReal enclose(long bits) const override {
    if (exact_) return IntervalReal(*exact_);
    long e = static_cast<long>(bit_length(d_)) / 2 + 2;
    long extra = static_cast<long>(bit_length(ceil_q(abs_q(b_)) + 1));
    long prec = std::max(bits + e + extra + 4, 32L);
    IntervalReal s = sqrt_enclosure(IntervalReal(Rational(d_)), prec);
    return IntervalReal(a_) + IntervalReal(b_) * s;
  }

  std::optional<Rational> exact() const override { return exact_; }
  std::string describe() const override {
    return to_string(a_) + " + " + to_string(b_) + "*sqrt(" + to_string(d_) + ")";
  }

 private:
  Rational a_, b_;
  Integer d_;
  std::optional<Rational> exact_;
};

}  // namespace

ExactReal::ExactReal() : gen_(std::make_shared<LiteralGen>(Rational(0))) {}
ExactReal::ExactReal(const Rational& q) : gen_(std::make_shared<LiteralGen>(q)) {}
ExactReal::ExactReal(long q) : gen_(std::make_shared<LiteralGen>(Rational(q))) {}
ExactReal::ExactReal(std::shared_ptr<const RealGenerator> gen) : gen_(std::move(gen)) {
  if (!gen_) throw std::invalid_argument("null generator");
}

IntervalReal ExactReal::eval_bits(long bits) const { return gen_->enclose(std::max(bits, 0L)); }

IntervalReal ExactReal::eval(const Rational& width) const {
  if (width <= 0) throw std::invalid_argument("width must be positive");
  return eval_bits(width_bits(width));
}

IntervalReal eval(const ExactReal& x, const Rational& width) { return x.eval(width); }

ReciprocalSeries::ReciprocalSeries(std::vector<Integer> denominators, std::vector<int> signs,
                                   Integer next_lower_bound, std::string label)
    : den_(std::move(denominators)),
      sign_(std::move(signs)),
      next_lb_(std::move(next_lower_bound)),
      label_(std::move(label)) {
  if (sign_.empty()) sign_.assign(den_.size(), 1);
  if (sign_.size() != den_.size()) throw DimensionMismatch("series signs/denominators length");
  if (den_.empty()) throw std::invalid_argument("series needs at least one term");
  for (size_t i = 0; i < den_.size(); ++i) {
    if (den_[i] <= 0) throw std::invalid_argument("series denominators must be positive");
    if (sign_[i] != 1 && sign_[i] != -1) throw std::invalid_argument("series signs must be +-1");
    if (i > 0 && den_[i] < 2 * den_[i - 1]) {
      throw InvariantViolation("series ratio below 2 at term " + std::to_string(i + 1));
    }
  }
  if (next_lb_ < 2 * den_.back()) throw InvariantViolation("series next-term bound below ratio 2");
  all_positive_ = std::all_of(sign_.begin(), sign_.end(), [](int s) { return s == 1; });
}

Rational ReciprocalSeries::prefix(size_t k) const {
  Rational acc(0);
  for (size_t i = 0; i < k && i < den_.size(); ++i) acc += Rational(sign_[i], den_[i]);
  acc.canonicalize();
  return acc;
}

Rational ReciprocalSeries::term_bound(size_t k) const {
  Rational r = k < den_.size() ? Rational(1, den_[k]) : Rational(1, next_lb_);
  r.canonicalize();
  return r;
}

std::pair<Rational, Rational> ReciprocalSeries::tail(size_t k) const {
  Rational t = 2 * term_bound(k);
  if (all_positive_) return {Rational(0), t};
  return {Rational(-t), t};
}

size_t ReciprocalSeries::terms_for(long bits) const {
  Rational target = pow2(-bits) / 2;
  for (size_t k = 1; k <= den_.size(); ++k) {
    auto [lo, hi] = tail(k);
    if (hi - lo <= target) return k;
  }
  throw InsufficientLevels("series '" + label_ + "' exhausted at precision 2^-" + std::to_string(bits));
}

IntervalReal ReciprocalSeries::enclose(long bits) const {
  size_t k = terms_for(bits);
  Rational p = prefix(k);
  auto [lo, hi] = tail(k);
  return IntervalReal(p + lo, p + hi).round_out(bits + 2);
}

ExactReal reciprocal_series(std::vector<Integer> denominators, std::vector<int> signs,
                            Integer next_lower_bound, std::string label) {
  return ExactReal(std::make_shared<ReciprocalSeries>(std::move(denominators), std::move(signs),
                                                      std::move(next_lower_bound), std::move(label)));
}

ExactReal linear_combination(const std::vector<std::pair<Rational, ExactReal>>& terms,
                             const Rational& constant) {
  return ExactReal(std::make_shared<LinearGen>(terms, constant));
}

ExactReal quadratic_irrational(const Rational& a, const Rational& b, const Integer& d) {
  return ExactReal(std::make_shared<QuadraticGen>(a, b, d));
}

ExactReal operator+(const ExactReal& x, const ExactReal& y) {
  return linear_combination({{Rational(1), x}, {Rational(1), y}});
}

ExactReal operator-(const ExactReal& x, const ExactReal& y) {
  return linear_combination({{Rational(1), x}, {Rational(-1), y}});
}

ExactReal operator*(const Rational& k, const ExactReal& x) { return linear_combination({{k, x}}); }

}  // namespace dlab
