#include "heine/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heine/errors.hpp"
#include "heine/parallel.hpp"

namespace heine {

namespace {

FieldElement fe_int(const Field& K, const Integer& v) { return FieldElement(K, v); }

Integer ipow(const Integer& base, unsigned long e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

FieldElement lowest_coeff(const Poly& p) { return p.coeff(static_cast<std::size_t>(p.ord())); }

// log2 of |e| rounded, -inf for zero; only for precision estimates.
double approx_log2(const FieldElement& e) {
  if (e.is_zero()) return -std::numeric_limits<double>::infinity();
  return log2_abs(e);
}

// log2 of a positive mpfr value without underflow.
double log2_mpfr(mpfr_srcptr v) {
  long e = 0;
  const double d = mpfr_get_d_2exp(&e, v, MPFR_RNDN);
  return std::log2(std::fabs(d)) + static_cast<double>(e);
}

// Bits of relative accuracy of a box (negative infinity if it contains zero).
double relative_bits(const ComplexBox& b) {
  if (b.contains_zero()) return -std::numeric_limits<double>::infinity();
  const Interval mod = b.modulus();
  if (!mod.positive()) return -std::numeric_limits<double>::infinity();
  const Interval wr = b.re().width(), wi = b.im().width();
  const bool zr = mpfr_zero_p(wr.hi()), zi = mpfr_zero_p(wi.hi());
  if (zr && zi) return std::numeric_limits<double>::infinity();
  const double w = std::max(zr ? -1e300 : log2_mpfr(wr.hi()), zi ? -1e300 : log2_mpfr(wi.hi()));
  return log2_mpfr(mod.lo()) - w;
}

std::string box_json_string(const ComplexBox& b) {
  return "[" + b.re().to_dyadic_string() + "] + i[" + b.im().to_dyadic_string() + "]";
}

constexpr unsigned kMaxWorkingBits = 1u << 22;

// Evaluates `fn(bits)` for every (j, i) cell, raising the working precision
// until each result has `target` bits of relative accuracy or the cap is hit.
template <typename Fn>
std::vector<ComplexBox> adaptive(unsigned start, unsigned target, Fn fn) {
  std::vector<ComplexBox> out;
  unsigned work = start;
  for (;;) {
    out = fn(work);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& b : out) worst = std::min(worst, relative_bits(b));
    if (worst >= target || work >= kMaxWorkingBits) return out;
    unsigned next = 2 * work;
    if (std::isfinite(worst)) {
      next = std::max(next / 2 + 64, work + static_cast<unsigned>(target - worst) + 64);
    }
    work = std::min(next, kMaxWorkingBits);
  }
}

}  // namespace

IterationFamily iterate(const HeineInstance& inst, const PadeTriple& base) {
  const Field& K = inst.field();
  const std::size_t m = inst.m();
  const unsigned s = inst.s();
  const FieldElement& q = inst.q();
  if (base.B.size() != m || base.R.size() != m) throw ValidationError("Padé triple does not match the instance");

  IterationFamily fam;
  fam.N = base.profile.N();
  fam.delta = base.profile.delta();
  fam.clear_A = base.clearing.A;
  fam.clear_B = base.clearing.B;
  {
    std::vector<FieldElement> inv;
    for (const auto& x : inst.alphas()) inv.push_back(x.inverse());
    fam.clear_A1 = denominator_lcm(inv);
    fam.clear_A2 = denominator_lcm({inst.alpha()});
  }

  fam.A.push_back(base.A);
  fam.B.push_back(base.B);
  std::vector<Poly> R0;
  for (std::size_t i = 0; i < m; ++i) {
    fam.N_i.push_back(base.profile.Ni(i));
    fam.tracked.push_back(std::max(base.R[i].k_cap, fam.N + static_cast<unsigned>(m) * inst.S() + 1));
    Poly r(K);
    for (std::size_t k = 0; k < base.R[i].b.size(); ++k) r.set_coeff(base.R[i].order + k, base.R[i].b[k]);
    R0.push_back(r.truncate(fam.tracked[i]));
  }
  fam.R.push_back(R0);

  for (std::size_t j = 1; j <= m; ++j) {
    const Poly prevAq = fam.A[j - 1].shift_scale(q);
    fam.A.push_back(prevAq.shift_up(s));
    std::vector<Poly> Bj, Rj;
    for (std::size_t i = 0; i < m; ++i) {
      const FieldElement inv = inst.alpha_i(i).inverse();
      Bj.push_back((prevAq * inst.Q(i) + inst.P() * fam.B[j - 1][i].shift_scale(q)) * inv);
      Rj.push_back((inst.P().mul_trunc(fam.R[j - 1][i].shift_scale(q), fam.tracked[i])) * inv);
    }
    fam.B.push_back(std::move(Bj));
    fam.R.push_back(std::move(Rj));
  }

  for (std::size_t j = 0; j <= m; ++j) {
    const long jl = static_cast<long>(j);
    Poly closed = fam.A[0].shift_scale(q.pow(jl)).shift_up(j * s) * q.pow(static_cast<long>(s) * jl * (jl - 1) / 2);
    if (!(closed == fam.A[j])) {
      throw InconsistencyError("closed form of A_" + std::to_string(j) + " disagrees with the recursion");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const SeriesPrefix pre = series_coefficients(inst, i, fam.tracked[i]);
    const Poly f(K, pre.f);
    for (std::size_t j = 0; j <= m; ++j) {
      Poly lhs = fam.A[j].mul_trunc(f, fam.tracked[i]) - fam.B[j][i].truncate(fam.tracked[i]);
      if (!(lhs == fam.R[j][i])) {
        throw InconsistencyError("A_" + std::to_string(j) + " f_" + std::to_string(i + 1) + " - B_" +
                                 std::to_string(j) + std::to_string(i + 1) + " != R through the tracked degree");
      }
    }
  }
  return fam;
}

DeltaPoly delta_poly(const HeineInstance& inst, const IterationFamily& fam) {
  const Field& K = inst.field();
  const std::size_t m = inst.m();
  std::vector<std::vector<Poly>> mat(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    mat[j].push_back(fam.A[j]);
    for (std::size_t i = 0; i < m; ++i) mat[j].push_back(fam.B[j][i]);
  }
  DeltaPoly out;
  out.delta = subset_determinant(mat, Poly(K), Poly::constant(FieldElement(K, 1)));
  if (out.delta.is_zero()) {
    throw ValidationError("Delta(z) vanishes identically; the functions or the alpha_i violate the hypotheses");
  }
  out.ord = out.delta.ord();
  out.deg = out.delta.deg();
  for (unsigned n : fam.N_i) out.ord_lower += n;
  const unsigned Sm = inst.S() * static_cast<unsigned>(m * (m + 1) / 2);
  out.deg_upper = static_cast<unsigned>(m + 1) * fam.N + Sm;

  // (-1)^m a P_0^{m(m+1)/2} prod(alpha_i^-1 r_i q^{k_i}) prod_{i<j}(alpha_j^-1 q^{k_j} - alpha_i^-1 q^{k_i})
  out.lowest_predicted = FieldElement(K);
  bool known = true;
  std::vector<long> kk;
  for (std::size_t i = 0; i < m; ++i) {
    if (fam.R[0][i].is_zero()) {
      known = false;
      break;
    }
    kk.push_back(fam.R[0][i].ord());
  }
  if (known) {
    const FieldElement P0 = inst.P().coeff(0);
    FieldElement c = lowest_coeff(fam.A[0]) * P0.pow(static_cast<long>(m * (m + 1) / 2));
    if (m % 2 == 1) c = -c;
    std::vector<FieldElement> x;
    for (std::size_t i = 0; i < m; ++i) {
      x.push_back(inst.alpha_i(i).inverse() * inst.q().pow(kk[i]));
      c *= x.back() * lowest_coeff(fam.R[0][i]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) c *= x[j] - x[i];
    }
    out.lowest_predicted = c;
    long deg = fam.A[0].ord();
    for (long v : kk) deg += v;
    out.lowest_matches = out.ord == deg && out.delta.coeff(static_cast<std::size_t>(deg)) == c;
  }
  return out;
}

KWindow k_window(const HeineInstance& inst, const IterationFamily& fam, const Rational& rho) {
  const unsigned m = static_cast<unsigned>(inst.m());
  const Rational md = fam.delta * m;
  if (rho <= md) throw ValidationError("rho must exceed m delta");
  Rational lo = (rho - md) * fam.N - Rational(inst.S() * m * (m + 1) / 2) - 1;
  Rational hi = rho * fam.N;
  KWindow w;
  Integer t;
  mpz_fdiv_q(t.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  w.lo_exclusive = t.get_si();
  mpz_fdiv_q(t.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
  w.hi = t.get_si();
  return w;
}

long select_k(const HeineInstance& inst, const IterationFamily& fam, const DeltaPoly& delta, const Rational& rho) {
  const KWindow w = k_window(inst, fam, rho);
  const long first = std::max(0L, w.lo_exclusive + 1);
  if (first > w.hi) throw ValidationError("the k window is empty");
  for (long k = first; k <= w.hi; ++k) {
    if (!delta.delta.eval(inst.alpha() * inst.q().pow(-k)).is_zero()) return k;
  }
  throw InconsistencyError("every k in the window is a zero of Delta(alpha q^-k)");
}

Denominators denominators(const HeineInstance& inst, const IterationFamily& fam, long k) {
  if (k < 0) throw ValidationError("k must be non-negative");
  const Field& K = inst.field();
  const unsigned long m = inst.m();
  const unsigned long N = fam.N;
  const unsigned long S = inst.S();
  const unsigned long s = inst.s();
  const unsigned long u = inst.u();
  const unsigned long uk = static_cast<unsigned long>(k);
  const FieldElement a(inst.a());
  const FieldElement b(inst.b());
  const Integer& A = fam.clear_A;
  const Integer& B = fam.clear_B;

  FieldElement D = a.pow(static_cast<long>(N * (N + 1) / 2)) * b.pow(static_cast<long>(S * m * (m - 1) / 2 + m * N)) *
                   (fe_int(K, Integer(A * B * B)) * inst.P().coeff(0)).pow(static_cast<long>(N + 1)) *
                   fe_int(K, ipow(Integer(fam.clear_A1 * B), m));
  FieldElement Dhat = D * (a.pow(k) * fe_int(K, fam.clear_A2)).pow(static_cast<long>(m * S + N));
  FieldElement Dk = b.pow(static_cast<long>(s * uk * (uk + 1) / 2 + u * uk)) *
                    fe_int(K, ipow(Integer(A * B * ipow(fam.clear_A2, S)), uk)) * Dhat;
  if (!D.is_integral() || !Dhat.is_integral() || !Dk.is_integral()) {
    throw InconsistencyError("denominator D, D_hat or D_k is not in Z_K");
  }
  return {D.as_integral(), Dhat.as_integral(), Dk.as_integral()};
}

NumericForms numeric_forms(const HeineInstance& inst, const IterationFamily& fam, long k, unsigned bits) {
  const Field& K = inst.field();
  const std::size_t m = inst.m();
  const unsigned long uk = static_cast<unsigned long>(k);
  NumericForms out;
  out.k = k;
  out.den = denominators(inst, fam, k);
  const FieldElement D(out.den.D);
  const FieldElement Dhat(out.den.D_hat);
  const FieldElement Dk(out.den.D_k);
  const FieldElement w = inst.alpha() * inst.q().pow(-k);
  const FieldElement& alpha = inst.alpha();

  bool ok = true;
  std::vector<FieldElement> Aw(m + 1);
  std::vector<std::vector<FieldElement>> Bw(m + 1, std::vector<FieldElement>(m));
  for (std::size_t j = 0; j <= m; ++j) {
    ok = ok && (fam.A[j] * D).all_integral();
    Aw[j] = fam.A[j].eval(w);
    ok = ok && (Aw[j] * Dhat).is_integral();
    for (std::size_t i = 0; i < m; ++i) {
      ok = ok && (fam.B[j][i] * D).all_integral();
      Bw[j][i] = fam.B[j][i].eval(w);
      ok = ok && (Bw[j][i] * Dhat).is_integral();
    }
  }
  const FieldElement xy_scale =
      FieldElement(inst.b()).pow(static_cast<long>(inst.s() * uk * (uk + 1) / 2 + inst.u() * uk)) *
      fe_int(K, ipow(Integer(fam.clear_A * fam.clear_B * ipow(fam.clear_A2, inst.S())), uk));
  std::vector<FieldElement> X(m), Y(m), lambda(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto xy = downshift(inst, i, static_cast<unsigned>(k), alpha);
    X[i] = xy.first;
    Y[i] = xy.second;
    ok = ok && (X[i] * xy_scale).is_integral() && (Y[i] * xy_scale).is_integral();
    lambda[i] = (inst.alpha_i(i) * alpha.pow(inst.s())).pow(k) * inst.q().pow(static_cast<long>(inst.u()) * k);
  }
  for (std::size_t i = 1; i < m; ++i) {
    if (!(X[i] == X[0])) throw InconsistencyError("X_k(alpha) depends on i");
  }

  out.p.resize(m + 1);
  out.q.assign(m + 1, std::vector<RingElement>(m));
  for (std::size_t j = 0; j <= m; ++j) {
    const FieldElement p = Dk * Aw[j] * X[0];
    ok = ok && p.is_integral();
    out.p[j] = p.is_integral() ? p.as_integral() : RingElement(K, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const FieldElement qq = Dk * (lambda[i] * Bw[j][i] - Aw[j] * Y[i]);
      ok = ok && qq.is_integral();
      out.q[j][i] = qq.is_integral() ? qq.as_integral() : RingElement(K, 0);
    }
  }
  out.integrality_ok = ok;
  if (!ok) throw InconsistencyError("p_jk or q_jik (or a scaled intermediate) is not in Z_K");

  // Both routes per i, each at adaptive working precision.
  out.f_alpha.resize(m);
  out.r.assign(m + 1, std::vector<ComplexBox>(m));
  out.r_direct.assign(m + 1, std::vector<ComplexBox>(m));
  double log2_p = 0;
  for (const auto& p : out.p) {
    if (!p.is_zero()) log2_p = std::max(log2_p, approx_log2(FieldElement(p)));
  }
  parallel_for(m, [&](std::size_t i) {
    // log2 |r_ji| from the lowest term of D_k lambda_i R_ji(w); both routes
    // cancel down to this size.
    double log2_r = 0;
    for (std::size_t j = 0; j <= m; ++j) {
      const Poly& R = fam.R[j][i];
      if (R.is_zero()) continue;
      const double est = approx_log2(Dk * lambda[i]) + approx_log2(lowest_coeff(R)) +
                         static_cast<double>(R.ord()) * approx_log2(w);
      log2_r = std::min(log2_r, est);
    }
    const auto cancel = static_cast<unsigned>(-log2_r);
    std::vector<ComplexBox> r1 = adaptive(bits + static_cast<unsigned>(log2_p) + cancel + 64, bits, [&](unsigned b) {
      const auto prec = static_cast<mpfr_prec_t>(b + 32);
      ComplexBox f = eval_f(inst, i, alpha, b);
      out.f_alpha[i] = f;
      std::vector<ComplexBox> res;
      for (std::size_t j = 0; j <= m; ++j) res.push_back(to_box(out.p[j], prec) * f - to_box(out.q[j][i], prec));
      return res;
    });
    for (std::size_t j = 0; j <= m; ++j) out.r[j][i] = r1[j];

    std::vector<FieldElement> scale(m + 1);
    double log2_terms = 0;
    for (std::size_t j = 0; j <= m; ++j) {
      scale[j] = Dk * lambda[i];
      log2_terms = std::max({log2_terms, approx_log2(scale[j] * Aw[j]), approx_log2(scale[j] * Bw[j][i])});
    }
    std::vector<ComplexBox> r2 =
        adaptive(bits + static_cast<unsigned>(std::max(0.0, log2_terms)) + cancel + 64, bits, [&](unsigned b) {
          const auto prec = static_cast<mpfr_prec_t>(b + 32);
          ComplexBox f = eval_f(inst, i, w, b);
          std::vector<ComplexBox> res;
          for (std::size_t j = 0; j <= m; ++j) {
            res.push_back(to_box(scale[j] * Aw[j], prec) * f - to_box(scale[j] * Bw[j][i], prec));
          }
          return res;
        });
    for (std::size_t j = 0; j <= m; ++j) out.r_direct[j][i] = r2[j];
  });
  out.routes_agree = true;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i < m; ++i) out.routes_agree = out.routes_agree && out.r[j][i].overlaps(out.r_direct[j][i]);
  }
  return out;
}

DeltaKCertificate delta_k_certificate(const HeineInstance& inst, const IterationFamily& fam, const DeltaPoly& delta,
                                      const NumericForms& forms) {
  const Field& K = inst.field();
  const std::size_t m = inst.m();
  std::vector<std::vector<RingElement>> mat(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    mat[j].push_back(forms.p[j]);
    for (std::size_t i = 0; i < m; ++i) mat[j].push_back(forms.q[j][i]);
  }
  DeltaKCertificate c;
  c.delta_k = subset_determinant(mat, RingElement(K, 0), RingElement(K, 1));
  c.nonzero = !c.delta_k.is_zero();

  const long k = forms.k;
  const FieldElement& alpha = inst.alpha();
  const FieldElement w = alpha * inst.q().pow(-k);
  FieldElement f = FieldElement(forms.den.D_k).pow(static_cast<long>(m + 1)) *
                   downshift(inst, 0, static_cast<unsigned>(k), alpha).first *
                   (inst.q().pow(inst.u()) * alpha.pow(inst.s())).pow(static_cast<long>(m) * k) * delta.delta.eval(w);
  for (std::size_t i = 0; i < m; ++i) f *= inst.alpha_i(i).pow(k);
  c.factorization_matches = f.is_integral() && f.as_integral() == c.delta_k;
  c.factorized = f.is_integral() ? f.as_integral() : RingElement(K, 0);
  if (!c.nonzero) throw InconsistencyError("Delta_k = 0 although k was selected with Delta(alpha q^-k) != 0");
  (void)fam;
  return c;
}

ChainResult run_chain(const HeineInstance& inst, const PadeTriple& base, const Rational& rho, unsigned bits) {
  ChainResult res;
  res.family = iterate(inst, base);
  res.delta = delta_poly(inst, res.family);
  res.rho = rho;
  res.window = k_window(inst, res.family, rho);
  const long k = select_k(inst, res.family, res.delta, rho);
  res.forms = numeric_forms(inst, res.family, k, bits);
  res.certificate = delta_k_certificate(inst, res.family, res.delta, res.forms);
  return res;
}

nlohmann::json to_json(const ChainResult& c) {
  using nlohmann::json;
  json j;
  const NumericForms& f = c.forms;
  j["rho"] = c.rho.get_str();
  j["k"] = f.k;
  j["window"] = {{"lo_exclusive", c.window.lo_exclusive}, {"hi", c.window.hi}};
  j["delta_poly"] = {{"ord", c.delta.ord},
                     {"deg", c.delta.deg},
                     {"ord_lower", c.delta.ord_lower},
                     {"deg_upper", c.delta.deg_upper},
                     {"lowest_coefficient", c.delta.delta.coeff(static_cast<std::size_t>(c.delta.ord)).to_string()},
                     {"lowest_matches", c.delta.lowest_matches}};
  j["clearing"] = {{"A", c.family.clear_A.get_str()},
                   {"B", c.family.clear_B.get_str()},
                   {"A1", c.family.clear_A1.get_str()},
                   {"A2", c.family.clear_A2.get_str()}};
  j["D"] = f.den.D.to_string();
  j["D_hat"] = f.den.D_hat.to_string();
  j["D_k"] = f.den.D_k.to_string();
  json p = json::array(), q = json::array(), r = json::array(), rd = json::array();
  for (std::size_t jj = 0; jj < f.p.size(); ++jj) {
    p.push_back(f.p[jj].to_string());
    json qrow = json::array(), rrow = json::array(), rdrow = json::array();
    for (std::size_t i = 0; i < f.q[jj].size(); ++i) {
      qrow.push_back(f.q[jj][i].to_string());
      rrow.push_back(box_json_string(f.r[jj][i]));
      rdrow.push_back(box_json_string(f.r_direct[jj][i]));
    }
    q.push_back(qrow);
    r.push_back(rrow);
    rd.push_back(rdrow);
  }
  j["p"] = p;
  j["q"] = q;
  j["r"] = r;
  j["r_direct"] = rd;
  j["delta_k"] = c.certificate.delta_k.to_string();
  j["verification"] = {{"integrality", f.integrality_ok},
                       {"routes_agree", f.routes_agree},
                       {"delta_k_nonzero", c.certificate.nonzero},
                       {"delta_k_factorization", c.certificate.factorization_matches},
                       {"delta_order_ok", c.delta.ord >= static_cast<long>(c.delta.ord_lower)},
                       {"delta_degree_ok", c.delta.deg <= static_cast<long>(c.delta.deg_upper)}};
  return j;
}

}  // namespace heine
