#pragma once

#include "dlab/exactnum.hpp"

// Certified transcendental enclosures backed by MPFR directed rounding.
// `prec` is the MPFR working precision in bits (relative accuracy).
namespace dlab {

IntervalReal pi_enclosure(long prec);
IntervalReal log_enclosure(const IntervalReal& x, long prec);
IntervalReal exp_enclosure(const IntervalReal& x, long prec);
IntervalReal sqrt_enclosure(const IntervalReal& x, long prec);
// x^e for x > 0, or any x when e is a nonnegative integer.
IntervalReal pow_enclosure(const IntervalReal& x, const Rational& e, long prec);

// Rational number with 2^-bits absolute accuracy for log(x); convenience for
// exponent searches.
IntervalReal log_rational(const Rational& x, long bits);

}  // namespace dlab
