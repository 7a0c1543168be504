#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlab {

using Integer = mpz_class;
using Rational = mpq_class;

// Accepts "p/q", "-7", "0.125", "1e-12", "2^-20".
Rational parse_rational(std::string_view text);
std::string to_string(const Integer& z);
std::string to_string(const Rational& q);

Integer floor_q(const Rational& q);
Integer ceil_q(const Rational& q);
Rational abs_q(const Rational& q);
Rational pow2(long exponent);
Rational pow_q(const Rational& base, unsigned long exponent);
// num/den in canonical form; throws on a zero denominator.
Rational ratio(const Integer& num, const Integer& den);

// Smallest k >= 0 with 2^-k <= width.
long width_bits(const Rational& width);
size_t bit_length(const Integer& z);

enum class Ordering { Less, Greater, Overlap };

class IntervalReal {
 public:
  IntervalReal() = default;
  IntervalReal(const Rational& point);  // NOLINT(google-explicit-constructor)
  IntervalReal(long point);             // NOLINT(google-explicit-constructor)
  IntervalReal(Rational lo, Rational hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational midpoint() const;
  Rational radius() const;
  Rational mag() const;  // max |x| over the interval
  Rational mig() const;  // min |x| over the interval

  bool is_point() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const IntervalReal& other) const;
  bool certainly_positive() const { return lo_ > 0; }
  bool certainly_negative() const { return hi_ < 0; }

  IntervalReal operator-() const;
  IntervalReal& operator+=(const IntervalReal& o);
  IntervalReal& operator-=(const IntervalReal& o);
  IntervalReal& operator*=(const IntervalReal& o);

  IntervalReal abs() const;
  IntervalReal pow(unsigned long k) const;
  // Empty when the interval straddles an integer boundary.
  std::optional<Integer> floor() const;
  std::optional<Integer> ceil() const;
  // Outward rounding of both endpoints to the grid 2^-bits.
  IntervalReal round_out(long bits) const;
  double approx() const;

  bool operator==(const IntervalReal& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  Rational lo_{0};
  Rational hi_{0};
};

IntervalReal operator+(IntervalReal a, const IntervalReal& b);
IntervalReal operator-(IntervalReal a, const IntervalReal& b);
IntervalReal operator*(IntervalReal a, const IntervalReal& b);
// Throws std::domain_error when the divisor contains zero.
IntervalReal operator/(const IntervalReal& a, const IntervalReal& b);

Ordering cmp_certified(const IntervalReal& a, const IntervalReal& b);
IntervalReal hull(const IntervalReal& a, const IntervalReal& b);
IntervalReal imin(const IntervalReal& a, const IntervalReal& b);
IntervalReal imax(const IntervalReal& a, const IntervalReal& b);
std::string to_string(const IntervalReal& x);

class RealGenerator {
 public:
  virtual ~RealGenerator() = default;
  // Enclosure of width at most 2^-bits.
  virtual IntervalReal enclose(long bits) const = 0;
  virtual std::optional<Rational> exact() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

class ExactReal {
 public:
  ExactReal();
  ExactReal(const Rational& q);  // NOLINT(google-explicit-constructor)
  ExactReal(long q);             // NOLINT(google-explicit-constructor)
  explicit ExactReal(std::shared_ptr<const RealGenerator> gen);

  IntervalReal eval(const Rational& width) const;
  IntervalReal eval_bits(long bits) const;
  std::optional<Rational> rational() const { return gen_->exact(); }
  bool is_rational() const { return rational().has_value(); }
  std::string describe() const { return gen_->describe(); }
  const std::shared_ptr<const RealGenerator>& generator() const { return gen_; }

 private:
  std::shared_ptr<const RealGenerator> gen_;
};

IntervalReal eval(const ExactReal& x, const Rational& width);

// Σ s_i / a_i with a_{i+1} >= 2 a_i; the omitted remainder after the last
// stored term is at most 2 / next_lower_bound in modulus.
class ReciprocalSeries : public RealGenerator {
 public:
  ReciprocalSeries(std::vector<Integer> denominators, std::vector<int> signs,
                   Integer next_lower_bound, std::string label);

  IntervalReal enclose(long bits) const override;
  std::string describe() const override { return label_; }

  size_t terms() const { return den_.size(); }
  // Exact prefix of the first k terms.
  Rational prefix(size_t k) const;
  // Certified bounds on the remainder after k terms.
  std::pair<Rational, Rational> tail(size_t k) const;
  // Number of terms consumed at precision bits.
  size_t terms_for(long bits) const;

 private:
  Rational term_bound(size_t k) const;

  std::vector<Integer> den_;
  std::vector<int> sign_;
  Integer next_lb_;
  bool all_positive_;
  std::string label_;
};

ExactReal reciprocal_series(std::vector<Integer> denominators, std::vector<int> signs,
                            Integer next_lower_bound, std::string label);
ExactReal linear_combination(const std::vector<std::pair<Rational, ExactReal>>& terms,
                             const Rational& constant = 0);
// a + b·√d with d > 0.
ExactReal quadratic_irrational(const Rational& a, const Rational& b, const Integer& d);

ExactReal operator+(const ExactReal& x, const ExactReal& y);
ExactReal operator-(const ExactReal& x, const ExactReal& y);
ExactReal operator*(const Rational& k, const ExactReal& x);

}  // namespace dlab
