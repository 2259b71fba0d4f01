#include "heine/poly.hpp"

#include "heine/errors.hpp"

namespace heine {

Poly::Poly(Field f, std::vector<FieldElement> coeffs) : field_(f), coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (!(c.field() == field_)) throw ValidationError("polynomial coefficient from another field");
  }
  trim();
}

Poly Poly::monomial(const FieldElement& c, std::size_t k) {
  Poly p(c.field());
  if (c.is_zero()) return p;
  p.coeffs_.assign(k + 1, FieldElement(c.field()));
  p.coeffs_[k] = c;
  return p;
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

long Poly::ord() const {
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (!coeffs_[k].is_zero()) return static_cast<long>(k);
  }
  return -1;
}

FieldElement Poly::coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : FieldElement(field_); }

void Poly::set_coeff(std::size_t k, const FieldElement& c) {
  if (k >= coeffs_.size()) {
    if (c.is_zero()) return;
    coeffs_.resize(k + 1, FieldElement(field_));
  }
  coeffs_[k] = c;
  trim();
}

FieldElement Poly::eval(const FieldElement& x) const {
  FieldElement acc(field_);
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    acc *= x;
    acc += coeffs_[k];
  }
  return acc;
}

FieldElement Poly::eval_naive(const FieldElement& x) const {
  FieldElement acc(field_);
  FieldElement power(field_, 1);
  for (const auto& c : coeffs_) {
    acc += c * power;
    power *= x;
  }
  return acc;
}

Poly Poly::shift_scale(const FieldElement& c) const {
  Poly out(field_);
  out.coeffs_.reserve(coeffs_.size());
  FieldElement power(field_, 1);
  for (const auto& a : coeffs_) {
    out.coeffs_.push_back(a * power);
    power *= c;
  }
  out.trim();
  return out;
}

Poly Poly::shift_up(std::size_t k) const {
  if (is_zero()) return *this;
  Poly out(field_);
  out.coeffs_.assign(k, FieldElement(field_));
  out.coeffs_.insert(out.coeffs_.end(), coeffs_.begin(), coeffs_.end());
  return out;
}

Poly Poly::truncate(long n) const {
  Poly out(field_);
  if (n < 0) return out;
  std::size_t keep = std::min(coeffs_.size(), static_cast<std::size_t>(n) + 1);
  out.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + static_cast<long>(keep));
  out.trim();
  return out;
}

Poly Poly::mul_trunc(const Poly& o, long n) const {
  Poly out(field_);
  if (is_zero() || o.is_zero() || n < 0) return out;
  std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(n), coeffs_.size() + o.coeffs_.size() - 2);
  out.coeffs_.assign(top + 1, FieldElement(field_));
  for (std::size_t i = 0; i < coeffs_.size() && i <= top; ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < o.coeffs_.size() && i + j <= top; ++j) {
      if (o.coeffs_[j].is_zero()) continue;
      out.coeffs_[i + j] += coeffs_[i] * o.coeffs_[j];
    }
  }
  out.trim();
  return out;
}

bool Poly::all_integral() const {
  for (const auto& c : coeffs_) {
    if (!c.is_integral()) return false;
  }
  return true;
}

Integer Poly::denominator() const { return denominator_lcm(coeffs_); }

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  if (!(field_ == o.field_)) throw ValidationError("polynomials over different fields");
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), FieldElement(field_));
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly& Poly::operator*=(const Poly& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  *this = mul_trunc(o, static_cast<long>(coeffs_.size() + o.coeffs_.size()));
  return *this;
}

Poly& Poly::operator*=(const FieldElement& c) {
  for (auto& a : coeffs_) a *= c;
  trim();
  return *this;
}

std::string Poly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) out += ",";
    out += coeffs_[k].to_string();
  }
  return out;
}

Poly Poly::parse(const Field& f, std::string_view text) {
  std::vector<FieldElement> cs;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(',', pos);
    std::string_view piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    cs.push_back(FieldElement::parse(f, piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Poly(f, std::move(cs));
}

}  // namespace heine
