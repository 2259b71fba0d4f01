#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "heine/ring.hpp"

namespace heine {

// Polynomial over K, coefficients lowest degree first, no trailing zeros.
// Also used as a truncated power series: callers pass explicit truncation
// degrees where the distinction matters.
class Poly {
 public:
  explicit Poly(Field f) : field_(f) {}
  Poly(Field f, std::vector<FieldElement> coeffs);
  static Poly monomial(const FieldElement& c, std::size_t k);
  static Poly constant(const FieldElement& c) { return monomial(c, 0); }

  const Field& field() const { return field_; }
  bool is_zero() const { return coeffs_.empty(); }
  // -1 for the zero polynomial.
  long deg() const { return static_cast<long>(coeffs_.size()) - 1; }
  // Order of vanishing at 0; -1 for the zero polynomial.
  long ord() const;
  const std::vector<FieldElement>& coeffs() const { return coeffs_; }
  // Coefficient of z^k (zero beyond the degree).
  FieldElement coeff(std::size_t k) const;
  void set_coeff(std::size_t k, const FieldElement& c);

  FieldElement eval(const FieldElement& x) const;        // Horner
  FieldElement eval_naive(const FieldElement& x) const;  // sum of c_k x^k
  // z -> p(c z)
  Poly shift_scale(const FieldElement& c) const;
  // z -> z^k p(z)
  Poly shift_up(std::size_t k) const;
  // Terms of degree <= n.
  Poly truncate(long n) const;
  // Product truncated to degree <= n.
  Poly mul_trunc(const Poly& o, long n) const;
  bool all_integral() const;
  // Least common denominator of all coefficients.
  Integer denominator() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const FieldElement& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  friend Poly operator*(Poly a, const FieldElement& c) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.field_ == b.field_ && a.coeffs_ == b.coeffs_; }

  // Comma separated coefficients, lowest degree first ("0" for zero).
  std::string to_string() const;
  static Poly parse(const Field& f, std::string_view text);

 private:
  void trim();
  Field field_;
  std::vector<FieldElement> coeffs_;
};

// Determinant of a square matrix over a commutative ring by expansion over
// column subsets (exact, no division). Suitable for the small (m+1)x(m+1)
// matrices of the iteration step.
template <typename T>
T subset_determinant(const std::vector<std::vector<T>>& m, const T& zero, const T& one) {
  const std::size_t n = m.size();
  if (n == 0) return one;
  std::vector<T> dp(std::size_t{1} << n, zero);
  dp[0] = one;
  for (std::size_t mask = 1; mask < dp.size(); ++mask) {
    std::size_t row = static_cast<std::size_t>(__builtin_popcountll(mask)) - 1;
    T acc = zero;
    bool have = false;
    int pos = 0;  // columns of mask above j, for the sign
    for (std::size_t j = n; j-- > 0;) {
      if (!(mask & (std::size_t{1} << j))) continue;
      T term = m[row][j] * dp[mask & ~(std::size_t{1} << j)];
      if (pos % 2 == 1) term = -term;
      if (have) {
        acc = acc + term;
      } else {
        acc = term;
        have = true;
      }
      ++pos;
    }
    dp[mask] = acc;
  }
  return dp.back();
}

}  // namespace heine
