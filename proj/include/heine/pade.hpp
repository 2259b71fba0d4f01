#pragma once

// Padé-type approximations of the second kind for f_1..f_m:
//
//   A(z) = sum_{mu<=N} a_mu q^{-mu(mu-1)/2} z^mu,  a_mu in Z_K,
//   A f_i - B_i = R_i,  deg B_i <= N,  ord R_i >= N_i = N + n_i - floor(delta N).
//
// The a_mu come from a reduced basis of the integer kernel of the scaled
// linear system, not from an existence argument.

#include <string>
#include <vector>

#include "json.hpp"

#include "heine/interval.hpp"
#include "heine/lattice.hpp"
#include "heine/qdiff.hpp"

namespace heine {

class BlockProfile {
 public:
  // Throws ValidationError unless 0 < delta < 1/m and n_i >= delta N. A profile
  // with no equations is representable; building its system fails.
  BlockProfile(std::vector<unsigned> n, Rational delta);
  // n_i as equal as possible (larger blocks first).
  static BlockProfile balanced(unsigned m, unsigned N, const Rational& delta);

  std::size_t m() const { return n_.size(); }
  unsigned n(std::size_t i) const { return n_.at(i); }
  const std::vector<unsigned>& blocks() const { return n_; }
  unsigned N() const { return N_; }
  const Rational& delta() const { return delta_; }
  // floor(delta N)
  unsigned delta_floor() const { return dfloor_; }
  // N_i = N + n_i - floor(delta N)
  unsigned Ni(std::size_t i) const { return N_ + n_.at(i) - dfloor_; }
  // Number of equations, sum_i (n_i - floor(delta N) - 1).
  unsigned equations() const;
  std::string to_string() const;

 private:
  std::vector<unsigned> n_;
  unsigned N_ = 0;
  Rational delta_;
  unsigned dfloor_ = 0;
};

struct SystemRow {
  std::size_t i = 0;  // function index
  unsigned k = 0;     // coefficient index, N < k < N_i
  std::vector<RingElement> entries;  // coefficients of a_0..a_N
};

// Rows (i, k), k = N+1 .. N+n_i-floor(delta N)-1, of
//   sum_{nu=k-N}^{k} P_0^{k-nu} q^{(nu+1)(k-nu)} F_{i nu} a_{k-nu} = 0
// multiplied by (A B^2)^k b^{k(k+1)/2}; entries verified to lie in Z_K.
std::vector<SystemRow> build_system(const HeineInstance& inst, const BlockProfile& profile,
                                    const std::vector<SeriesPrefix>& prefixes);
std::vector<SystemRow> build_system_serial(const HeineInstance& inst, const BlockProfile& profile,
                                           const std::vector<SeriesPrefix>& prefixes);
std::vector<SystemRow> build_system(const HeineInstance& inst, const BlockProfile& profile);

// Smallest rational integers with A alpha_i in Z_K and B P, B Q_i in Z_K[z].
struct ClearingIntegers {
  Integer A;
  Integer B;
};
ClearingIntegers clearing_integers(const HeineInstance& inst);

struct SmallSolution {
  std::vector<RingElement> a;  // a_0..a_N
  std::size_t kernel_rank = 0;  // Z_K rank of the solution space
  lattice::LllStats lll;
  double log2_max_a = 0;           // log2 max |a_mu|
  double log2_max_coeff = 0;       // log2 max |matrix entry|
  double log2_siegel_target = 0;   // log2 of (B U)^{M/(B-M)} with c_K = 1
};

// Shortest (by sum |a_mu|^2) vector of an LLL-reduced kernel basis;
// ties broken by unit normalization then lexicographic serialization.
SmallSolution small_solution(const Field& field, const std::vector<SystemRow>& rows, std::size_t unknowns);

// Data for bounding R_i beyond the explicit coefficients.
struct Remainder {
  unsigned order = 0;                   // N_i
  unsigned k_cap = 0;                   // explicit b_{ik} up to here
  std::vector<FieldElement> b;          // b_{ik}, k = order..k_cap
};

struct PadeConstants {
  Rational C1;       // per function, max over i
  Interval sigma;    // sum_{mu<=N} |q|^{-mu(mu-1)/2}
  Interval amax;     // max |a_mu|
  Interval C4, C5, C6, C8, C9;
  double log2_C7 = 0;  // (Siegel target)^{1/N} with c_K = 1, log2
};

struct PadeTriple {
  BlockProfile profile;
  std::vector<RingElement> a;
  Poly A;
  std::vector<Poly> B;
  std::vector<Remainder> R;
  std::vector<unsigned> verified_order;  // exact ord R_i (>= N_i)
  ClearingIntegers clearing;
  PadeConstants constants;
  SmallSolution solution;

  // Certified upper bound 2 C_1^{N_i+1} amax sigma |z|^{N_i}, valid for C_1 |z| <= 1/2.
  Interval remainder_bound(std::size_t i, const FieldElement& z) const;
};

// Builds B_i, R_i from a and verifies vanishing orders and integrality.
PadeTriple assemble(const HeineInstance& inst, const BlockProfile& profile, const SmallSolution& sol,
                    std::vector<SeriesPrefix>& prefixes);

// Full pipeline: prefixes, system, solver, assembly.
PadeTriple build_pade(const HeineInstance& inst, const BlockProfile& profile);

// Enclosure of R_i(z) = A(z) f_i(z) - B_i(z), precision raised until the
// box excludes zero or `max_bits` is reached.
ComplexBox remainder_value(const HeineInstance& inst, const PadeTriple& pt, std::size_t i, const FieldElement& z,
                           unsigned max_bits = 1 << 16);

// gamma_1 = (2 - m delta)^2 (1 - m delta) / (2 m delta)
Rational gamma1(unsigned m, const Rational& delta);

nlohmann::json to_json(const PadeTriple& pt);

}  // namespace heine
