#pragma once

// Exact arithmetic in K = Q or an imaginary quadratic field Q(sqrt d), and in
// its ring of integers Z_K = Z[w].
//
//   w = sqrt(d)        if d = 2, 3 (mod 4)
//   w = (1 + sqrt d)/2 if d = 1 (mod 4)
//
// so that w^2 = t*w + c with (t, c) = (0, d) or (1, (d - 1)/4). The rational
// field is encoded as d = 0 and every element then has y = 0.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace heine {

using Integer = mpz_class;
using Rational = mpq_class;

class Field {
 public:
  static Field rational() { return Field(0); }
  // Throws ValidationError unless d is negative and square-free.
  static Field quadratic(std::int64_t d);
  // "rational" or a decimal integer.
  static Field parse(std::string_view text);

  bool is_rational() const { return d_ == 0; }
  std::int64_t discriminant_seed() const { return d_; }
  // w^2 = omega_trace() * w + omega_const()
  long omega_trace() const { return half_ ? 1 : 0; }
  long omega_const() const { return half_ ? (d_ - 1) / 4 : d_; }
  bool half_integral_basis() const { return half_; }
  std::string to_string() const;

  friend bool operator==(const Field& a, const Field& b) { return a.d_ == b.d_; }

 private:
  explicit Field(std::int64_t d);
  std::int64_t d_ = 0;
  bool half_ = false;
};

// x + y*w with x, y in Z.
class RingElement {
 public:
  RingElement() = default;
  RingElement(Field f, Integer x, Integer y = 0);

  const Field& field() const { return field_; }
  const Integer& x() const { return x_; }
  const Integer& y() const { return y_; }
  bool is_zero() const { return x_ == 0 && y_ == 0; }
  bool is_rational_integer() const { return y_ == 0; }

  RingElement conj() const;
  // x^2 + t*x*y - c*y^2 = |x + y w|^2, always a non-negative integer.
  Integer norm() const;
  // gcd of the two coordinates (non-negative).
  Integer content() const;

  RingElement operator-() const;
  RingElement& operator+=(const RingElement& o);
  RingElement& operator-=(const RingElement& o);
  RingElement& operator*=(const RingElement& o);
  RingElement& operator*=(const Integer& k);
  friend RingElement operator+(RingElement a, const RingElement& b) { return a += b; }
  friend RingElement operator-(RingElement a, const RingElement& b) { return a -= b; }
  friend RingElement operator*(RingElement a, const RingElement& b) { return a *= b; }
  friend RingElement operator*(RingElement a, const Integer& k) { return a *= k; }
  friend bool operator==(const RingElement& a, const RingElement& b) {
    return a.x_ == b.x_ && a.y_ == b.y_ && a.field_ == b.field_;
  }

  RingElement pow(unsigned long e) const;
  std::string to_string() const;
  static RingElement parse(const Field& f, std::string_view text);

 private:
  Field field_ = Field::rational();
  Integer x_ = 0;
  Integer y_ = 0;
};

// num / den with den a positive rational integer and gcd(x, y, den) = 1.
// The representation is unique, so == is structural.
class FieldElement {
 public:
  FieldElement() = default;
  explicit FieldElement(Field f) : num_(f, 0, 0) {}
  FieldElement(Field f, long v) : num_(f, v, 0) {}
  FieldElement(Field f, const Integer& v) : num_(f, v, 0) {}
  FieldElement(Field f, const Rational& v);
  FieldElement(const RingElement& r) : num_(r) {}  // NOLINT: Z_K embeds in K
  FieldElement(RingElement num, Integer den);

  const Field& field() const { return num_.field(); }
  const RingElement& num() const { return num_; }
  const Integer& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_ == 1 && num_.x() == 1 && num_.y() == 0; }
  bool is_integral() const { return den_ == 1; }
  bool is_rational() const { return num_.y() == 0; }
  Rational rational_part() const;  // valid when is_rational()

  FieldElement conj() const;
  FieldElement inverse() const;  // throws ValidationError on zero
  FieldElement pow(long e) const;
  // Exact |e|^2 under any complex embedding.
  Rational abs_squared() const;

  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  FieldElement& operator/=(const FieldElement& o);
  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }
  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.den_ == b.den_ && a.num_ == b.num_;
  }

  // Integral element; throws InconsistencyError if the denominator is not 1.
  RingElement as_integral() const;

  std::string to_string() const;
  static FieldElement parse(const Field& f, std::string_view text);

 private:
  void canonicalize();
  RingElement num_;
  Integer den_ = 1;
};

Rational abs_squared(const RingElement& e);
Rational abs_squared(const FieldElement& e);

// Units of Z_K (+-1, plus +-i or the sixth roots of unity for d = -1, -3).
std::vector<RingElement> units(const Field& f);

// Smallest positive rational integer n with n*e integral.
Integer denominator_lcm(const std::vector<FieldElement>& elems);

// Integer bit length of |v| (0 for v = 0).
std::size_t bit_length(const Integer& v);

}  // namespace heine
