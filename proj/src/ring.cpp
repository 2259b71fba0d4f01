#include "heine/ring.hpp"

#include <cctype>
#include <cstdlib>

#include "heine/errors.hpp"

namespace heine {

namespace {

bool square_free(std::int64_t v) {
  std::uint64_t n = v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}

void require_same(const Field& a, const Field& b) {
  if (!(a == b)) throw ValidationError("mixed fields: " + a.to_string() + " vs " + b.to_string());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Integer parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw ValidationError("empty integer");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw ValidationError("malformed integer '" + std::string(s) + "'");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) {
      throw ValidationError("malformed integer '" + std::string(s) + "'");
    }
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return Integer(digits, 10);
}

}  // namespace

Field::Field(std::int64_t d) : d_(d) {
  // d < 0, so d mod 4 == 1 means d % 4 == -3 in C++.
  half_ = d != 0 && ((d % 4) + 4) % 4 == 1;
}

Field Field::quadratic(std::int64_t d) {
  if (d >= 0) throw ValidationError("field seed d must be negative (imaginary quadratic), got " + std::to_string(d));
  if (!square_free(d)) throw ValidationError("field seed d must be square-free, got " + std::to_string(d));
  return Field(d);
}

Field Field::parse(std::string_view text) {
  text = trim(text);
  if (text == "rational" || text == "Q" || text == "0") return rational();
  Integer v = parse_integer(text);
  if (!v.fits_slong_p()) throw ValidationError("field seed out of range");
  return quadratic(v.get_si());
}

std::string Field::to_string() const { return is_rational() ? "rational" : std::to_string(d_); }

// ---------------------------------------------------------------------------

RingElement::RingElement(Field f, Integer x, Integer y) : field_(f), x_(std::move(x)), y_(std::move(y)) {
  if (field_.is_rational() && y_ != 0) throw ValidationError("rational field element with w-part");
}

RingElement RingElement::conj() const {
  // conj(w) = t - w
  return RingElement(field_, x_ + field_.omega_trace() * y_, -y_);
}

Integer RingElement::norm() const {
  return x_ * x_ + field_.omega_trace() * x_ * y_ - field_.omega_const() * y_ * y_;
}

Integer RingElement::content() const {
  Integer g;
  mpz_gcd(g.get_mpz_t(), x_.get_mpz_t(), y_.get_mpz_t());
  return g;
}

RingElement RingElement::operator-() const { return RingElement(field_, -x_, -y_); }

RingElement& RingElement::operator+=(const RingElement& o) {
  require_same(field_, o.field_);
  x_ += o.x_;
  y_ += o.y_;
  return *this;
}

RingElement& RingElement::operator-=(const RingElement& o) {
  require_same(field_, o.field_);
  x_ -= o.x_;
  y_ -= o.y_;
  return *this;
}

RingElement& RingElement::operator*=(const RingElement& o) {
  require_same(field_, o.field_);
  if (y_ == 0 && o.y_ == 0) {
    x_ *= o.x_;
    return *this;
  }
  Integer yy = y_ * o.y_;
  Integer nx = x_ * o.x_ + field_.omega_const() * yy;
  Integer ny = x_ * o.y_ + o.x_ * y_ + field_.omega_trace() * yy;
  x_ = std::move(nx);
  y_ = std::move(ny);
  return *this;
}

RingElement& RingElement::operator*=(const Integer& k) {
  x_ *= k;
  y_ *= k;
  return *this;
}

RingElement RingElement::pow(unsigned long e) const {
  RingElement result(field_, 1, 0);
  RingElement base = *this;
  while (e > 0) {
    if (e & 1UL) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

std::string RingElement::to_string() const {
  if (y_ == 0) return x_.get_str();
  std::string out = x_.get_str();
  if (y_ < 0) {
    Integer ay = -y_;
    out += "-" + ay.get_str() + "*w";
  } else {
    out += "+" + y_.get_str() + "*w";
  }
  return out;
}

RingElement RingElement::parse(const Field& f, std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ValidationError("empty ring element");
  Integer x = 0, y = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < text.size()) {
    std::size_t end = pos + 1;
    while (end < text.size() && text[end] != '+' && text[end] != '-') ++end;
    std::string_view term = trim(text.substr(pos, end - pos));
    pos = end;
    if (term.empty()) throw ValidationError("malformed ring element '" + std::string(text) + "'");
    int sign = 1;
    if (term[0] == '+' || term[0] == '-') {
      sign = term[0] == '-' ? -1 : 1;
      term = trim(term.substr(1));
    }
    if (term.empty()) throw ValidationError("malformed ring element '" + std::string(text) + "'");
    if (term.back() == 'w') {
      if (f.is_rational()) throw ValidationError("w used in the rational field: '" + std::string(text) + "'");
      std::string_view coeff = trim(term.substr(0, term.size() - 1));
      Integer c = 1;
      if (!coeff.empty()) {
        if (coeff.back() != '*') throw ValidationError("malformed w-term '" + std::string(term) + "'");
        c = parse_integer(coeff.substr(0, coeff.size() - 1));
      }
      y += sign * c;
    } else {
      x += sign * parse_integer(term);
    }
    any = true;
  }
  if (!any) throw ValidationError("malformed ring element '" + std::string(text) + "'");
  return RingElement(f, x, y);
}

// ---------------------------------------------------------------------------

FieldElement::FieldElement(Field f, const Rational& v) : num_(f, v.get_num(), 0), den_(v.get_den()) {
  canonicalize();
}

FieldElement::FieldElement(RingElement num, Integer den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw ValidationError("zero denominator");
  canonicalize();
}

void FieldElement::canonicalize() {
  if (den_ < 0) {
    den_ = -den_;
    num_ = -num_;
  }
  if (num_.is_zero()) {
    den_ = 1;
    return;
  }
  if (den_ == 1) return;
  Integer g = num_.content();
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), den_.get_mpz_t());
  if (g != 1) {
    RingElement reduced(num_.field(), num_.x() / g, num_.y() / g);
    num_ = std::move(reduced);
    den_ /= g;
  }
}

Rational FieldElement::rational_part() const {
  Rational r(num_.x(), den_);
  r.canonicalize();
  return r;
}

FieldElement FieldElement::conj() const { return FieldElement(num_.conj(), den_); }

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw ValidationError("division by zero in K");
  // den / num = den * conj(num) / norm(num)
  RingElement n = num_.conj();
  n *= den_;
  return FieldElement(std::move(n), num_.norm());
}

FieldElement FieldElement::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  Integer d;
  mpz_pow_ui(d.get_mpz_t(), den_.get_mpz_t(), static_cast<unsigned long>(e));
  // gcd(num, den) = 1 is preserved by powers only up to content; canonicalize anyway.
  return FieldElement(num_.pow(static_cast<unsigned long>(e)), d);
}

Rational FieldElement::abs_squared() const {
  Rational r(num_.norm(), den_ * den_);
  r.canonicalize();
  return r;
}

FieldElement FieldElement::operator-() const {
  FieldElement r = *this;
  r.num_ = -r.num_;
  return r;
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  require_same(field(), o.field());
  if (den_ == o.den_) {
    num_ += o.num_;
  } else {
    num_ *= o.den_;
    num_ += o.num_ * den_;
    den_ *= o.den_;
  }
  canonicalize();
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) { return *this += -o; }

FieldElement& FieldElement::operator*=(const FieldElement& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  canonicalize();
  return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& o) { return *this *= o.inverse(); }

RingElement FieldElement::as_integral() const {
  if (den_ != 1) throw InconsistencyError("expected an element of Z_K, got " + to_string());
  return num_;
}

std::string FieldElement::to_string() const {
  if (den_ == 1) return num_.to_string();
  if (num_.y() == 0) return num_.x().get_str() + "/" + den_.get_str();
  return "(" + num_.to_string() + ")/" + den_.get_str();
}

FieldElement FieldElement::parse(const Field& f, std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ValidationError("empty field element");
  std::size_t slash = text.rfind('/');
  if (slash == std::string_view::npos) return FieldElement(RingElement::parse(f, text));
  std::string_view head = trim(text.substr(0, slash));
  Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  if (head.size() >= 2 && head.front() == '(' && head.back() == ')') head = head.substr(1, head.size() - 2);
  return FieldElement(RingElement::parse(f, head), den);
}

Rational abs_squared(const RingElement& e) { return Rational(e.norm()); }
Rational abs_squared(const FieldElement& e) { return e.abs_squared(); }

std::vector<RingElement> units(const Field& f) {
  std::vector<RingElement> u{RingElement(f, 1, 0), RingElement(f, -1, 0)};
  if (f.discriminant_seed() == -1) {
    u.emplace_back(f, 0, 1);
    u.emplace_back(f, 0, -1);
  } else if (f.discriminant_seed() == -3) {
    // w = (1 + sqrt -3)/2 is a primitive sixth root of unity; w - 1 = w^2.
    u.emplace_back(f, 0, 1);
    u.emplace_back(f, 0, -1);
    u.emplace_back(f, -1, 1);
    u.emplace_back(f, 1, -1);
  }
  return u;
}

Integer denominator_lcm(const std::vector<FieldElement>& elems) {
  Integer l = 1;
  for (const auto& e : elems) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.den().get_mpz_t());
  return l;
}

std::size_t bit_length(const Integer& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

}  // namespace heine
