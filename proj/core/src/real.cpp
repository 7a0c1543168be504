#include "dlab/real.hpp"

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>

namespace dlab {

namespace {

class Mpfr {
 public:
  explicit Mpfr(long prec) { mpfr_init2(v_, std::max(prec, static_cast<long>(MPFR_PREC_MIN))); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

  Rational to_q() {
    if (!mpfr_number_p(v_)) throw std::domain_error("non-finite MPFR value");
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

 private:
  mpfr_t v_;
};

template <typename F>
Rational apply(const Rational& x, long prec, mpfr_rnd_t rnd, F f) {
  Mpfr in(prec + 16), out(prec);
  // Round the argument in the direction that keeps f monotone-safe.
  mpfr_set_q(in.get(), x.get_mpq_t(), rnd);
  f(out.get(), in.get(), rnd);
  return out.to_q();
}

}  // namespace

IntervalReal pi_enclosure(long prec) {
  Mpfr lo(prec), hi(prec);
  mpfr_const_pi(lo.get(), MPFR_RNDD);
  mpfr_const_pi(hi.get(), MPFR_RNDU);
  return IntervalReal(lo.to_q(), hi.to_q());
}

IntervalReal log_enclosure(const IntervalReal& x, long prec) {
  if (x.lo() <= 0) throw std::domain_error("log of non-positive interval");
  auto f = [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t r) { mpfr_log(o, i, r); };
  return IntervalReal(apply(x.lo(), prec, MPFR_RNDD, f), apply(x.hi(), prec, MPFR_RNDU, f));
}

IntervalReal exp_enclosure(const IntervalReal& x, long prec) {
  auto f = [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t r) { mpfr_exp(o, i, r); };
  return IntervalReal(apply(x.lo(), prec, MPFR_RNDD, f), apply(x.hi(), prec, MPFR_RNDU, f));
}

IntervalReal sqrt_enclosure(const IntervalReal& x, long prec) {
  if (x.lo() < 0) throw std::domain_error("sqrt of negative interval");
  auto f = [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t r) { mpfr_sqrt(o, i, r); };
  return IntervalReal(apply(x.lo(), prec, MPFR_RNDD, f), apply(x.hi(), prec, MPFR_RNDU, f));
}

IntervalReal pow_enclosure(const IntervalReal& x, const Rational& e, long prec) {
  if (e.get_den() == 1 && e >= 0) {
    return x.pow(e.get_num().get_ui());
  }
  if (x.lo() <= 0) throw std::domain_error("real power of non-positive interval");
  if (e.get_den() == 1) {
    return IntervalReal(1) / x.pow(Integer(-e.get_num()).get_ui());
  }
  // x^e = exp(e log x) with both factors enclosed; monotone in each argument.
  IntervalReal l = log_enclosure(x, prec + 16);
  IntervalReal p = IntervalReal(e) * l;
  return exp_enclosure(p, prec);
}

IntervalReal log_rational(const Rational& x, long bits) {
  long mag = static_cast<long>(std::max(bit_length(x.get_num()), bit_length(x.get_den())));
  long extra = static_cast<long>(bit_length(Integer(mag))) + 16;
  IntervalReal l = log_enclosure(IntervalReal(x), bits + extra);
  return l.round_out(bits + 2);
}

}  // namespace dlab
