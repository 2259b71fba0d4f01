#pragma once

// Exact lattice tools: integral LLL (de Weger / Cohen, all quantities kept
// as integers) and saturated integer kernels of integer matrices.

#include <cstddef>
#include <functional>
#include <vector>

#include "heine/ring.hpp"

namespace heine::lattice {

using IntVec = std::vector<Integer>;

// Positive definite integral form on Z^n, built from identical diagonal
// blocks of size 1 (<x,y> = xy) or 2 (the doubled norm form of Z_K in the
// (1, w) basis: 2xx' + t(xy' + yx') - 2c yy').
class BlockForm {
 public:
  static BlockForm euclidean() { return BlockForm(1, 0, 0); }
  static BlockForm ring_norm(const Field& f);

  std::size_t block() const { return block_; }
  Integer inner(const IntVec& u, const IntVec& v) const;
  // Same form, restricted to the first n coordinates, plus weight^2 * u_n * v_n
  // on coordinate n (the "tail").
  Integer inner_with_tail(const IntVec& u, const IntVec& v, std::size_t n, const Integer& weight_sq) const;

 private:
  BlockForm(std::size_t block, long t, long c) : block_(block), t_(t), c_(c) {}
  Integer inner_prefix(const IntVec& u, const IntVec& v, std::size_t n) const;
  std::size_t block_;
  long t_;
  long c_;
};

struct LllStats {
  std::size_t swaps = 0;
  std::size_t reductions = 0;
};

using InnerProduct = std::function<Integer(const IntVec&, const IntVec&)>;

// In-place LLL reduction with parameter delta = delta_num/delta_den
// (default 99/100). Basis vectors must be linearly independent; throws
// InconsistencyError otherwise.
LllStats lll_reduce(std::vector<IntVec>& basis, const InnerProduct& inner, long delta_num = 99, long delta_den = 100);

// LLL-reduced basis (under `form`) of {x in Z^n : row . x = 0 for all rows}.
// Equations are absorbed one at a time; each step reduces the weighted
// embedding [b_j | W (row . b_j)], whose first r - 1 reduced vectors span the
// new kernel once W exceeds the LLL approximation gap.
std::vector<IntVec> integer_kernel(const std::vector<IntVec>& rows, std::size_t n, const BlockForm& form,
                                   LllStats* stats = nullptr);

Integer dot(const IntVec& a, const IntVec& b);

// Z_K-linear equations sum_j c_j a_j = 0 in unknowns a_j = x_j + y_j w, as
// Z-linear equations in (x_1, y_1, x_2, y_2, ...): one row for the 1-part and
// one for the w-part (a single row each over Q).
std::vector<IntVec> expand_rows(const Field& f, const std::vector<std::vector<RingElement>>& rows);
// Inverse of the coordinate layout used by expand_rows.
std::vector<RingElement> collapse(const Field& f, const IntVec& v);

}  // namespace heine::lattice
