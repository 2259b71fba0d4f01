#pragma once

// Rigorous real intervals and complex boxes with dyadic (MPFR) endpoints.
// Every operation rounds outward, so the true value is always enclosed.
// Binary operations run at the larger of the two operand precisions.

#include <string>

#include <mpfr.h>

#include "heine/ring.hpp"

namespace heine {

class Interval {
 public:
  static constexpr mpfr_prec_t kDefaultPrecision = 64;

  Interval() : Interval(kDefaultPrecision) {}
  explicit Interval(mpfr_prec_t prec);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  static Interval from_integer(const Integer& v, mpfr_prec_t prec);
  static Interval from_rational(const Rational& v, mpfr_prec_t prec);
  static Interval from_endpoints(const Rational& lo, const Rational& hi, mpfr_prec_t prec);
  static Interval from_double(double v, mpfr_prec_t prec = kDefaultPrecision);
  // [-r, r]
  static Interval symmetric(const Interval& radius);
  static Interval hull(const Interval& a, const Interval& b);

  mpfr_prec_t precision() const { return prec_; }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  Rational lower_rational() const;
  Rational upper_rational() const;
  double lower() const;  // rounded down
  double upper() const;  // rounded up
  double mid() const;
  Interval width() const;

  bool contains_zero() const;
  bool positive() const;  // lo > 0
  bool negative() const;  // hi < 0
  bool contains(const Rational& v) const;
  bool contains(const Interval& o) const;
  bool overlaps(const Interval& o) const;
  bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_, o.lo_); }

  Interval operator-() const;
  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  // Throws ValidationError if b contains zero.
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval& operator+=(const Interval& b) { return *this = *this + b; }
  Interval& operator-=(const Interval& b) { return *this = *this - b; }
  Interval& operator*=(const Interval& b) { return *this = *this * b; }
  Interval& operator/=(const Interval& b) { return *this = *this / b; }

  Interval sqrt() const;    // requires lo >= 0 (negative part clipped to 0)
  Interval square() const;  // tight for intervals straddling zero
  Interval abs() const;
  Interval log() const;     // requires lo > 0
  Interval exp() const;
  Interval pow(unsigned long e) const;
  Interval root(unsigned long k) const;  // requires lo >= 0
  // Same interval re-rounded outward to another precision.
  Interval with_precision(mpfr_prec_t prec) const;

  // Endpoints as exact "mantissa*2^exp" strings.
  std::string to_dyadic_string() const;
  std::string to_string(int digits = 20) const;

 private:
  mpfr_prec_t prec_;
  mpfr_t lo_;
  mpfr_t hi_;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

Interval max_upper(const Interval& a, const Interval& b);

// Complex box re + i*im.
class ComplexBox {
 public:
  ComplexBox() = default;
  explicit ComplexBox(mpfr_prec_t prec) : re_(prec), im_(prec) {}
  ComplexBox(Interval re, Interval im) : re_(std::move(re)), im_(std::move(im)) {}

  const Interval& re() const { return re_; }
  const Interval& im() const { return im_; }
  mpfr_prec_t precision() const;

  Interval abs_squared() const;
  Interval modulus() const;
  bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
  bool overlaps(const ComplexBox& o) const { return re_.overlaps(o.re_) && im_.overlaps(o.im_); }
  // Enlarge both coordinates by [-r, r].
  ComplexBox inflate(const Interval& r) const;

  ComplexBox operator-() const { return ComplexBox(-re_, -im_); }
  friend ComplexBox operator+(const ComplexBox& a, const ComplexBox& b);
  friend ComplexBox operator-(const ComplexBox& a, const ComplexBox& b);
  friend ComplexBox operator*(const ComplexBox& a, const ComplexBox& b);
  friend ComplexBox operator/(const ComplexBox& a, const ComplexBox& b);
  ComplexBox& operator+=(const ComplexBox& b) { return *this = *this + b; }
  ComplexBox& operator*=(const ComplexBox& b) { return *this = *this * b; }

  std::string to_string(int digits = 20) const;

 private:
  Interval re_;
  Interval im_;
};

ComplexBox operator+(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator-(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator*(const ComplexBox& a, const ComplexBox& b);
ComplexBox operator/(const ComplexBox& a, const ComplexBox& b);

// Enclosure of the image of e under the embedding with Im(w) > 0.
ComplexBox to_box(const FieldElement& e, mpfr_prec_t prec);
ComplexBox to_box(const RingElement& e, mpfr_prec_t prec);

// Enclosure of |e| of relative width <= 2^(1 - bits); dyadic endpoints.
Interval modulus_interval(const FieldElement& e, unsigned bits);

// Upper bound for log2|v| (v != 0), computed from bit lengths; cheap.
double log2_abs_upper(const FieldElement& e);
double log2_abs(const FieldElement& e);

}  // namespace heine
