#include "heine/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "heine/errors.hpp"

namespace heine {

namespace {

Rational mpfr_to_rational(mpfr_srcptr x) {
  Integer m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  Rational r(m);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

std::string mpfr_dyadic(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return "0";
  Integer m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  // strip trailing zero bits so the text form is unique
  unsigned long tz = mpz_scan1(m.get_mpz_t(), 0);
  m >>= tz;
  e += static_cast<mpfr_exp_t>(tz);
  return m.get_str() + "*2^" + std::to_string(e);
}

}  // namespace

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& o) : prec_(o.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : prec_(o.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this == &o) return *this;
  prec_ = o.prec_;
  mpfr_set_prec(lo_, prec_);
  mpfr_set_prec(hi_, prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  std::swap(prec_, o.prec_);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_integer(const Integer& v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_rational(const Rational& v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_endpoints(const Rational& lo, const Rational& hi, mpfr_prec_t prec) {
  if (lo > hi) throw ValidationError("interval endpoints out of order");
  Interval r(prec);
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_double(double v, mpfr_prec_t prec) {
  Interval r(std::max<mpfr_prec_t>(prec, 53));
  mpfr_set_d(r.lo_, v, MPFR_RNDD);
  mpfr_set_d(r.hi_, v, MPFR_RNDU);
  return r;
}

Interval Interval::symmetric(const Interval& radius) {
  Interval r(radius.prec_);
  Interval a = radius.abs();
  mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
  mpfr_set(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Rational Interval::lower_rational() const { return mpfr_to_rational(lo_); }
Rational Interval::upper_rational() const { return mpfr_to_rational(hi_); }
double Interval::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

Interval Interval::width() const {
  Interval r(prec_);
  mpfr_sub(r.lo_, hi_, lo_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
  return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::negative() const { return mpfr_sgn(hi_) < 0; }

bool Interval::contains(const Rational& v) const {
  return mpfr_cmp_q(lo_, v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, v.get_mpq_t()) >= 0;
}

bool Interval::contains(const Interval& o) const {
  return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
}

bool Interval::overlaps(const Interval& o) const {
  return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
}

Interval Interval::operator-() const {
  Interval r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  mpfr_prec_t p = std::max(a.prec_, b.prec_);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw ValidationError("interval division by an interval containing zero");
  mpfr_prec_t p = std::max(a.prec_, b.prec_);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Interval Interval::sqrt() const {
  Interval r(prec_);
  if (mpfr_sgn(hi_) < 0) throw ValidationError("sqrt of a negative interval");
  if (mpfr_sgn(lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  if (mpfr_sgn(hi_) <= 0) return -*this;
  Interval r(prec_);
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  if (mpfr_greater_p(hi_, r.hi_)) mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::square() const {
  Interval a = abs();
  Interval r(prec_);
  mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::log() const {
  if (mpfr_sgn(lo_) <= 0) throw ValidationError("log of an interval not bounded away from zero");
  Interval r(prec_);
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::exp() const {
  Interval r(prec_);
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::pow(unsigned long e) const {
  Interval result = from_integer(1, prec_);
  Interval base = *this;
  while (e > 0) {
    if (e & 1UL) result *= base;
    e >>= 1;
    if (e > 0) base = base.square();
  }
  return result;
}

Interval Interval::root(unsigned long k) const {
  if (mpfr_sgn(hi_) < 0) throw ValidationError("root of a negative interval");
  Interval r(prec_);
  if (mpfr_sgn(lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_rootn_ui(r.lo_, lo_, k, MPFR_RNDD);
  }
  mpfr_rootn_ui(r.hi_, hi_, k, MPFR_RNDU);
  return r;
}

Interval Interval::with_precision(mpfr_prec_t prec) const {
  Interval r(prec);
  mpfr_set(r.lo_, lo_, MPFR_RNDD);
  mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

std::string Interval::to_dyadic_string() const { return "[" + mpfr_dyadic(lo_) + ", " + mpfr_dyadic(hi_) + "]"; }

std::string Interval::to_string(int digits) const {
  char* a = nullptr;
  char* b = nullptr;
  mpfr_asprintf(&a, "%.*RDe", digits, lo_);
  mpfr_asprintf(&b, "%.*RUe", digits, hi_);
  std::string out = std::string("[") + a + ", " + b + "]";
  mpfr_free_str(a);
  mpfr_free_str(b);
  return out;
}

Interval max_upper(const Interval& a, const Interval& b) { return Interval::hull(a, b); }

// ---------------------------------------------------------------------------

mpfr_prec_t ComplexBox::precision() const { return std::max(re_.precision(), im_.precision()); }

Interval ComplexBox::abs_squared() const { return re_.square() + im_.square(); }
Interval ComplexBox::modulus() const { return abs_squared().sqrt(); }

ComplexBox ComplexBox::inflate(const Interval& r) const {
  Interval s = Interval::symmetric(r);
  return ComplexBox(re_ + s, im_ + s);
}

ComplexBox operator+(const ComplexBox& a, const ComplexBox& b) { return ComplexBox(a.re_ + b.re_, a.im_ + b.im_); }
ComplexBox operator-(const ComplexBox& a, const ComplexBox& b) { return ComplexBox(a.re_ - b.re_, a.im_ - b.im_); }

ComplexBox operator*(const ComplexBox& a, const ComplexBox& b) {
  return ComplexBox(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
}

ComplexBox operator/(const ComplexBox& a, const ComplexBox& b) {
  Interval n = b.abs_squared();
  ComplexBox num = a * ComplexBox(b.re_, -b.im_);
  return ComplexBox(num.re_ / n, num.im_ / n);
}

std::string ComplexBox::to_string(int digits) const {
  if (im_.contains_zero() && mpfr_zero_p(im_.lo()) && mpfr_zero_p(im_.hi())) return re_.to_string(digits);
  return re_.to_string(digits) + " + i*" + im_.to_string(digits);
}

ComplexBox to_box(const RingElement& e, mpfr_prec_t prec) { return to_box(FieldElement(e), prec); }

ComplexBox to_box(const FieldElement& e, mpfr_prec_t prec) {
  const Field& f = e.field();
  const Integer& x = e.num().x();
  const Integer& y = e.num().y();
  if (y == 0) return ComplexBox(Interval::from_rational(Rational(x, e.den()) , prec), Interval(prec));
  // w = sqrt(d) -> (x + i*y*sqrt|d|)/n ; w = (1 + sqrt d)/2 -> (x + y/2 + i*y*sqrt|d|/2)/n
  Integer scale = f.half_integral_basis() ? Integer(2) * e.den() : e.den();
  Integer rx = f.half_integral_basis() ? Integer(2) * x + y : x;
  Rational re(rx, scale);
  re.canonicalize();
  Rational im_coeff(y, scale);
  im_coeff.canonicalize();
  mpfr_prec_t wp = prec + 8;
  Interval root = Interval::from_integer(Integer(-f.discriminant_seed()), wp).sqrt();
  Interval im = (Interval::from_rational(im_coeff, wp) * root).with_precision(prec);
  return ComplexBox(Interval::from_rational(re, prec), im);
}

Interval modulus_interval(const FieldElement& e, unsigned bits) {
  if (bits < 8) throw ValidationError("modulus_interval needs bits >= 8");
  Rational n = e.abs_squared();
  mpfr_prec_t p = static_cast<mpfr_prec_t>(bits) + 2;
  return Interval::from_rational(n, p).sqrt();
}

namespace {
double log2_mpz(const Integer& v) {
  if (v == 0) return -HUGE_VAL;
  long e = 0;
  double d = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::log2(std::fabs(d)) + static_cast<double>(e);
}
}  // namespace

double log2_abs(const FieldElement& e) {
  if (e.is_zero()) return -HUGE_VAL;
  return 0.5 * (log2_mpz(e.num().norm()) - 2.0 * log2_mpz(e.den()));
}

double log2_abs_upper(const FieldElement& e) {
  if (e.is_zero()) return -HUGE_VAL;
  return 0.5 * static_cast<double>(bit_length(e.num().norm())) - static_cast<double>(bit_length(e.den())) + 1.0;
}

}  // namespace heine
