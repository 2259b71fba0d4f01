#pragma once

// The q-difference system
//
//     alpha_i z^s f_i(z) = P(z) f_i(q z) + Q_i(z),   i = 1..m,
//
// its power-series solutions, the generalized Heine series phi, and rigorous
// enclosures of both. With Q_i = -P one has f_i(q) = phi(alpha_i).

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heine/interval.hpp"
#include "heine/poly.hpp"
#include "heine/ring.hpp"

namespace heine {

class HeineInstance {
 public:
  // Validates every hypothesis (|q| > 1, P(0) != 0, P(q^-k) != 0,
  // alpha_i / alpha_j not a power of q, P(alpha q^-k) != 0) and throws
  // ValidationError naming the first violation.
  HeineInstance(Field field, RingElement a, RingElement b, unsigned s, Poly P, std::vector<Poly> Q,
                std::vector<FieldElement> alphas, FieldElement alpha, unsigned k_max = 64);

  // Plain-text "key = value" config; see README for the keys.
  static HeineInstance parse_config(std::string_view text, const std::string& origin = "<config>");
  static HeineInstance load_config(const std::string& path);

  // Instances with Q_i = -P, whose solutions satisfy f_i(q) = phi(alpha_i).
  // alpha defaults to q.
  static HeineInstance heine_system(Field field, RingElement a, RingElement b, unsigned s, Poly P,
                                    std::vector<FieldElement> alphas);

  const Field& field() const { return field_; }
  const RingElement& a() const { return a_; }
  const RingElement& b() const { return b_; }
  const FieldElement& q() const { return q_; }
  unsigned s() const { return s_; }
  const Poly& P() const { return P_; }
  const Poly& Q(std::size_t i) const { return Q_.at(i); }
  const std::vector<Poly>& Qs() const { return Q_; }
  const FieldElement& alpha_i(std::size_t i) const { return alphas_.at(i); }
  const std::vector<FieldElement>& alphas() const { return alphas_; }
  const FieldElement& alpha() const { return alpha_; }
  std::size_t m() const { return alphas_.size(); }
  unsigned t() const { return static_cast<unsigned>(P_.deg()); }
  unsigned u() const { return u_; }
  unsigned S() const { return std::max(s_, u_); }
  // Number of k values verified exactly for P(q^-k) != 0 (the rest follow
  // from the root-modulus bound).
  unsigned k_verified() const { return k_verified_; }
  // True when every Q_i equals -P.
  bool is_heine_system() const;
  // deg P = s and alpha_i = P_s q^n for some n >= 1 makes f_i a polynomial.
  bool solutions_non_polynomial() const;

  std::string to_config() const;

 private:
  Field field_;
  RingElement a_, b_;
  FieldElement q_;
  unsigned s_;
  Poly P_;
  std::vector<Poly> Q_;
  std::vector<FieldElement> alphas_;
  FieldElement alpha_;
  unsigned u_ = 0;
  unsigned k_verified_ = 0;
};

struct SeriesPrefix {
  std::size_t index = 0;
  std::vector<FieldElement> f;  // f_{i,0..nu_max}
  std::vector<FieldElement> F;  // P_0^{nu+1} q^{nu(nu+1)/2} f_nu
  Rational C1;                  // |f_nu| <= C1^{nu+1}
};

// Explicit majorant (|alpha_i| + sum_{l>=1} |P_l||q|^{1-l} + max|Q_nu|)/|P_0| + 1,
// rounded up to a dyadic rational.
Rational growth_constant(const HeineInstance& inst, std::size_t i);

// Coefficients from P_0 q^nu f_nu = alpha_i f_{nu-s} - sum_{l>=1} P_l q^{nu-l} f_{nu-l} - Q_nu.
SeriesPrefix series_coefficients(const HeineInstance& inst, std::size_t i, std::size_t nu_max);
// Extends a prefix in place to nu_max.
void extend_series(const HeineInstance& inst, SeriesPrefix& prefix, std::size_t nu_max);

// Exact coefficients of alpha_i z^s f(z) - P(z) f(qz) - Q_i(z) through degree
// `degree`, computed with generic polynomial arithmetic from the prefix.
std::vector<FieldElement> equation_residual(const HeineInstance& inst, const SeriesPrefix& prefix,
                                            std::size_t degree);

// Enclosure of phi(z) of relative width <= 2^(1-bits).
ComplexBox eval_phi(const HeineInstance& inst, const FieldElement& z, unsigned bits);

// Enclosure of f_i(z). The series path needs the certified coefficient decay
// to beat |z|; the continuation path sums the q-shifted expansion and fails
// at poles. eval_f picks the series path when it certifies, otherwise the
// continuation.
ComplexBox eval_f(const HeineInstance& inst, std::size_t i, const FieldElement& z, unsigned bits);
// Returns false if the series tail cannot be certified for this z.
bool eval_f_series(const HeineInstance& inst, SeriesPrefix& prefix, const FieldElement& z, unsigned bits,
                   ComplexBox& out);
ComplexBox eval_f_continuation(const HeineInstance& inst, std::size_t i, const FieldElement& z, unsigned bits);

// Down-shift: (alpha_i z^s)^k q^{uk} f_i(z q^-k) = X_k(z) f_i(z) + Y_ik(z).
struct Downshift {
  Poly X;
  Poly Y;
};
Downshift downshift_poly(const HeineInstance& inst, std::size_t i, unsigned k);
std::pair<FieldElement, FieldElement> downshift(const HeineInstance& inst, std::size_t i, unsigned k,
                                                const FieldElement& z);

// Constants of |X_k(z)| <= C2^k |q|^{sk(k+1)/2} max(1,|z|)^{C3 k}: C2 = |q|^u sum|P_l|
// (upper bound), C3 = deg P.
struct DownshiftBound {
  Interval C2;
  unsigned C3 = 0;
};
DownshiftBound downshift_bound(const HeineInstance& inst);

// q^e for signed e, cached per instance would be nicer but powers are cheap.
FieldElement q_pow(const HeineInstance& inst, long e);

}  // namespace heine
