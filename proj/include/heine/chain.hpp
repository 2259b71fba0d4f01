#pragma once

// The iteration process on a Padé triple:
//
//   A_j(z)    = z^s A_{j-1}(qz)
//   B_{ji}(z) = alpha_i^{-1} (A_{j-1}(qz) Q_i(z) + P(z) B_{j-1,i}(qz))
//   R_{ji}(z) = alpha_i^{-1} P(z) R_{j-1,i}(qz)
//
// for j = 0..m, the determinant Delta(z) = det(A_j | B_{ji}), the choice of
// the shift k, the clearing denominators D, D_k and the integral forms
// r_{jik} = p_{jk} f_i(alpha) - q_{jik}.

#include <vector>

#include "json.hpp"

#include "heine/pade.hpp"

namespace heine {

struct IterationFamily {
  std::vector<Poly> A;               // A_0..A_m
  std::vector<std::vector<Poly>> B;  // B[j][i]
  std::vector<std::vector<Poly>> R;  // R[j][i], truncated at tracked[i]
  std::vector<unsigned> tracked;     // truncation degree per i
  std::vector<unsigned> N_i;
  unsigned N = 0;
  Rational delta;
  // Smallest rational integers: A alpha_i, B P, B Q_i, A1 alpha_i^{-1}, A2 alpha integral.
  Integer clear_A, clear_B, clear_A1, clear_A2;
};

// Builds A_j, B_{ji}, R_{ji} and verifies, exactly: the recursions, the closed
// form A_j(z) = q^{sj(j-1)/2} z^{js} A_0(q^j z), and A_j f_i - B_{ji} = R_{ji}
// through the tracked degree. Throws InconsistencyError on any mismatch.
IterationFamily iterate(const HeineInstance& inst, const PadeTriple& base);

struct DeltaPoly {
  Poly delta{Field::rational()};  // det(A_j | B_{ji}), exact
  long ord = 0;          // exact order at 0
  long deg = 0;          // exact degree
  unsigned ord_lower = 0;  // sum N_i
  unsigned deg_upper = 0;  // (m+1)N + S m(m+1)/2
  // Lowest coefficient recomputed from the lowest terms of A_0 and R_{0i}
  // (the Vandermonde structure), including the sign (-1)^m.
  FieldElement lowest_predicted;
  bool lowest_matches = false;
};

// Throws ValidationError if Delta vanishes identically.
DeltaPoly delta_poly(const HeineInstance& inst, const IterationFamily& fam);

struct KWindow {
  long lo_exclusive = 0;  // floor of (rho - m delta) N - S m(m+1)/2 - 1
  long hi = 0;            // floor(rho N)
};
KWindow k_window(const HeineInstance& inst, const IterationFamily& fam, const Rational& rho);

// Smallest k >= 0 in the window with Delta(alpha q^-k) != 0.
long select_k(const HeineInstance& inst, const IterationFamily& fam, const DeltaPoly& delta, const Rational& rho);

struct Denominators {
  RingElement D;
  RingElement D_hat;
  RingElement D_k;
};
Denominators denominators(const HeineInstance& inst, const IterationFamily& fam, long k);

struct NumericForms {
  long k = 0;
  Denominators den;
  std::vector<RingElement> p;               // p_{jk}
  std::vector<std::vector<RingElement>> q;  // q[j][i]
  std::vector<std::vector<ComplexBox>> r;   // r[j][i] = p f_i(alpha) - q
  std::vector<std::vector<ComplexBox>> r_direct;  // D_k (alpha_i alpha^s)^k q^{uk} R_{ji}(alpha q^-k)
  std::vector<ComplexBox> f_alpha;          // f_i(alpha)
  bool integrality_ok = false;  // D, D_hat, X/Y scalings and p, q in Z_K
  bool routes_agree = false;    // r and r_direct overlap
};

// Exact p, q and certified r, with relative width about 2^-bits.
NumericForms numeric_forms(const HeineInstance& inst, const IterationFamily& fam, long k, unsigned bits);

struct DeltaKCertificate {
  RingElement delta_k;     // det(p | q), exact
  RingElement factorized;  // D_k^{m+1} X_k (q^u alpha^s)^{mk} Delta(alpha q^-k) prod alpha_i^k
  bool nonzero = false;
  bool factorization_matches = false;
};
DeltaKCertificate delta_k_certificate(const HeineInstance& inst, const IterationFamily& fam, const DeltaPoly& delta,
                                      const NumericForms& forms);

struct ChainResult {
  IterationFamily family;
  DeltaPoly delta;
  Rational rho;
  KWindow window;
  NumericForms forms;
  DeltaKCertificate certificate;
};

ChainResult run_chain(const HeineInstance& inst, const PadeTriple& base, const Rational& rho, unsigned bits);

nlohmann::json to_json(const ChainResult& c);

}  // namespace heine
