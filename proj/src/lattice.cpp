#include "heine/lattice.hpp"

#include <algorithm>

#include "heine/errors.hpp"

namespace heine::lattice {

BlockForm BlockForm::ring_norm(const Field& f) {
  if (f.is_rational()) return euclidean();
  return BlockForm(2, f.omega_trace(), f.omega_const());
}

Integer BlockForm::inner_prefix(const IntVec& u, const IntVec& v, std::size_t n) const {
  Integer acc = 0;
  if (block_ == 1) {
    for (std::size_t i = 0; i < n; ++i) acc += u[i] * v[i];
    return acc;
  }
  for (std::size_t i = 0; i < n; i += 2) {
    const Integer& x = u[i];
    const Integer& y = u[i + 1];
    const Integer& xp = v[i];
    const Integer& yp = v[i + 1];
    acc += 2 * x * xp + t_ * (x * yp + y * xp) - 2 * c_ * y * yp;
  }
  return acc;
}

Integer BlockForm::inner(const IntVec& u, const IntVec& v) const { return inner_prefix(u, v, u.size()); }

Integer BlockForm::inner_with_tail(const IntVec& u, const IntVec& v, std::size_t n, const Integer& weight_sq) const {
  return inner_prefix(u, v, n) + weight_sq * u[n] * v[n];
}

Integer dot(const IntVec& a, const IntVec& b) {
  Integer acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<IntVec> expand_rows(const Field& f, const std::vector<std::vector<RingElement>>& rows) {
  std::vector<IntVec> out;
  if (f.is_rational()) {
    out.reserve(rows.size());
    for (const auto& row : rows) {
      IntVec v;
      v.reserve(row.size());
      for (const auto& c : row) v.push_back(c.x());
      out.push_back(std::move(v));
    }
    return out;
  }
  const long t = f.omega_trace();
  const long cc = f.omega_const();
  out.reserve(2 * rows.size());
  for (const auto& row : rows) {
    // (cx + cy w)(x + y w) = (cx x + c cy y) + (cy x + (cx + t cy) y) w
    IntVec one, om;
    one.reserve(2 * row.size());
    om.reserve(2 * row.size());
    for (const auto& c : row) {
      one.push_back(c.x());
      one.push_back(cc * c.y());
      om.push_back(c.y());
      om.push_back(c.x() + t * c.y());
    }
    out.push_back(std::move(one));
    out.push_back(std::move(om));
  }
  return out;
}

std::vector<RingElement> collapse(const Field& f, const IntVec& v) {
  std::vector<RingElement> out;
  if (f.is_rational()) {
    for (const auto& x : v) out.emplace_back(f, x);
    return out;
  }
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) out.emplace_back(f, v[i], v[i + 1]);
  return out;
}

namespace {

// Nearest integer to num/den, den > 0.
Integer round_div(const Integer& num, const Integer& den) {
  Integer t = 2 * num + den;
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), Integer(2 * den).get_mpz_t());
  return q;
}

}  // namespace

LllStats lll_reduce(std::vector<IntVec>& basis, const InnerProduct& inner, long delta_num, long delta_den) {
  LllStats stats;
  const std::size_t n = basis.size();
  if (n == 0) return stats;
  // 1-based indexing for b, d and lambda, as in the textbook statement.
  std::vector<Integer> d(n + 1);
  std::vector<std::vector<Integer>> lam(n + 1, std::vector<Integer>(n + 1));
  auto b = [&](std::size_t i) -> IntVec& { return basis[i - 1]; };

  d[0] = 1;
  d[1] = inner(b(1), b(1));
  if (d[1] == 0) throw InconsistencyError("LLL: zero basis vector");
  std::size_t k = 2;
  std::size_t kmax = 1;

  auto reduce = [&](std::size_t kk, std::size_t l) {
    Integer two_lam = 2 * lam[kk][l];
    if (abs(two_lam) <= d[l]) return;
    Integer q = round_div(lam[kk][l], d[l]);
    IntVec& bk = b(kk);
    const IntVec& bl = b(l);
    for (std::size_t c = 0; c < bk.size(); ++c) bk[c] -= q * bl[c];
    lam[kk][l] -= q * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[kk][i] -= q * lam[l][i];
    ++stats.reductions;
  };

  auto swap = [&](std::size_t kk) {
    std::swap(b(kk), b(kk - 1));
    for (std::size_t j = 1; j + 1 < kk; ++j) std::swap(lam[kk][j], lam[kk - 1][j]);
    Integer l = lam[kk][kk - 1];
    Integer bb = (d[kk - 2] * d[kk] + l * l) / d[kk - 1];
    for (std::size_t i = kk + 1; i <= kmax; ++i) {
      Integer t = lam[i][kk];
      lam[i][kk] = (d[kk] * lam[i][kk - 1] - l * t) / d[kk - 1];
      lam[i][kk - 1] = (bb * t + l * lam[i][kk]) / d[kk];
    }
    d[kk - 1] = bb;
    ++stats.swaps;
  };

  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        Integer u = inner(b(k), b(j));
        for (std::size_t i = 1; i < j; ++i) u = (d[i] * u - lam[k][i] * lam[j][i]) / d[i - 1];
        if (j < k) {
          lam[k][j] = u;
        } else {
          if (u == 0) throw InconsistencyError("LLL: basis vectors are linearly dependent");
          d[k] = u;
        }
      }
    }
    reduce(k, k - 1);
    Integer lhs = delta_den * d[k] * d[k - 2];
    Integer rhs = delta_num * d[k - 1] * d[k - 1] - delta_den * lam[k][k - 1] * lam[k][k - 1];
    if (lhs < rhs) {
      swap(k);
      k = std::max<std::size_t>(2, k - 1);
      continue;
    }
    for (std::size_t l = k - 1; l-- > 1;) reduce(k, l);
    ++k;
  }
  return stats;
}

std::vector<IntVec> integer_kernel(const std::vector<IntVec>& rows, std::size_t n, const BlockForm& form,
                                   LllStats* stats) {
  std::vector<IntVec> basis(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) basis[i][i] = 1;

  for (const IntVec& row : rows) {
    if (row.size() != n) throw ValidationError("kernel: row length mismatch");
    if (basis.empty()) break;
    std::vector<Integer> vals(basis.size());
    bool all_zero = true;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      vals[j] = dot(row, basis[j]);
      if (vals[j] != 0) all_zero = false;
    }
    if (all_zero) continue;

    const std::size_t r = basis.size();
    Integer vmax = 0, bmax = 0;
    for (std::size_t j = 0; j < r; ++j) {
      vmax = std::max(vmax, Integer(abs(vals[j])));
      bmax = std::max(bmax, form.inner(basis[j], basis[j]));
    }
    std::size_t exponent = (r + 1) / 2 + bit_length(vmax) + (bit_length(bmax) + 1) / 2 + 3;

    for (int attempt = 0;; ++attempt) {
      Integer weight_sq = 1;
      weight_sq <<= static_cast<mp_bitcnt_t>(2 * exponent);
      std::vector<IntVec> emb(r);
      for (std::size_t j = 0; j < r; ++j) {
        emb[j] = basis[j];
        emb[j].push_back(vals[j]);
      }
      InnerProduct ip = [&](const IntVec& u, const IntVec& v) { return form.inner_with_tail(u, v, n, weight_sq); };
      LllStats s = lll_reduce(emb, ip);
      if (stats) {
        stats->swaps += s.swaps;
        stats->reductions += s.reductions;
      }
      bool ok = emb[r - 1][n] != 0;
      for (std::size_t j = 0; j + 1 < r && ok; ++j) ok = emb[j][n] == 0;
      if (ok) {
        basis.clear();
        for (std::size_t j = 0; j + 1 < r; ++j) {
          emb[j].pop_back();
          basis.push_back(std::move(emb[j]));
        }
        break;
      }
      if (attempt > 8) throw InconsistencyError("kernel: weighted embedding failed to separate");
      exponent *= 2;
    }
  }
  return basis;
}

}  // namespace heine::lattice
