#include "heine/pade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heine/errors.hpp"
#include "heine/parallel.hpp"

namespace heine {

namespace {

constexpr mpfr_prec_t kPrec = 64;

double log2_integer(const Integer& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

Interval abs_iv(const FieldElement& e) {
  if (e.is_zero()) return Interval::from_integer(0, kPrec);
  return modulus_interval(e, kPrec);
}

Interval iv(long v) { return Interval::from_integer(v, kPrec); }

struct RowSpec {
  std::size_t i;
  unsigned k;
};

std::vector<RowSpec> row_specs(const BlockProfile& profile) {
  std::vector<RowSpec> specs;
  for (std::size_t i = 0; i < profile.m(); ++i) {
    for (unsigned k = profile.N() + 1; k < profile.Ni(i); ++k) specs.push_back({i, k});
  }
  return specs;
}

SystemRow make_row(const HeineInstance& inst, const BlockProfile& profile, const SeriesPrefix& prefix,
                   const ClearingIntegers& ci, const RowSpec& spec) {
  const Field& K = inst.field();
  const unsigned N = profile.N();
  const unsigned k = spec.k;
  const FieldElement P0 = inst.P().coeff(0);
  // (A B^2)^k b^{k(k+1)/2}
  Integer ab2 = ci.A * ci.B * ci.B;
  Integer ab2k;
  mpz_pow_ui(ab2k.get_mpz_t(), ab2.get_mpz_t(), k);
  FieldElement scale = FieldElement(inst.b().pow(static_cast<unsigned long>(k) * (k + 1) / 2)) *
                       FieldElement(K, ab2k);
  SystemRow row;
  row.i = spec.i;
  row.k = k;
  row.entries.reserve(N + 1);
  FieldElement p0pow(K, 1);
  for (unsigned mu = 0; mu <= N; ++mu) {
    const unsigned nu = k - mu;
    FieldElement e = scale * p0pow * inst.q().pow(static_cast<long>(nu + 1) * mu) * prefix.F.at(nu);
    if (!e.is_integral()) {
      throw InconsistencyError("scaled system entry (i=" + std::to_string(spec.i + 1) + ", k=" + std::to_string(k) +
                               ", mu=" + std::to_string(mu) + ") is not in Z_K");
    }
    row.entries.push_back(e.as_integral());
    p0pow *= P0;
  }
  return row;
}

std::vector<SeriesPrefix> prefixes_for(const HeineInstance& inst, std::size_t nu_max) {
  std::vector<SeriesPrefix> out;
  for (std::size_t i = 0; i < inst.m(); ++i) out.push_back(series_coefficients(inst, i, nu_max));
  return out;
}

// M <= N - m always, so only M = 0 makes the system useless.
void check_feasible(const BlockProfile& profile) {
  if (profile.equations() == 0) throw ValidationError("profile infeasible: no equations (M = 0)");
}

void check_prefixes(const HeineInstance& inst, const BlockProfile& profile, const std::vector<SeriesPrefix>& p) {
  if (profile.m() != inst.m()) throw ValidationError("profile has " + std::to_string(profile.m()) +
                                                     " blocks but the instance has m = " + std::to_string(inst.m()));
  if (p.size() != inst.m()) throw ValidationError("need one series prefix per function");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].f.size() < profile.Ni(i)) throw ValidationError("series prefix too short for the system");
  }
}

}  // namespace

BlockProfile::BlockProfile(std::vector<unsigned> n, Rational delta) : n_(std::move(n)), delta_(std::move(delta)) {
  delta_.canonicalize();
  if (n_.empty()) throw ValidationError("block profile needs m >= 1");
  for (unsigned v : n_) {
    if (v == 0) throw ValidationError("block sizes n_i must be positive");
    N_ += v;
  }
  const auto m = static_cast<long>(n_.size());
  if (!(delta_ > 0) || !(delta_ * m < 1)) throw ValidationError("delta must satisfy 0 < delta < 1/m");
  Rational dN = delta_ * N_;
  for (unsigned v : n_) {
    if (Rational(v) < dN) throw ValidationError("block size " + std::to_string(v) + " is below delta N");
  }
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), dN.get_num_mpz_t(), dN.get_den_mpz_t());
  dfloor_ = static_cast<unsigned>(fl.get_ui());
}

BlockProfile BlockProfile::balanced(unsigned m, unsigned N, const Rational& delta) {
  if (m == 0 || N < m) throw ValidationError("balanced profile needs N >= m >= 1");
  std::vector<unsigned> n(m, N / m);
  for (unsigned i = 0; i < N % m; ++i) ++n[i];
  return BlockProfile(std::move(n), delta);
}

unsigned BlockProfile::equations() const {
  unsigned M = 0;
  for (unsigned v : n_) {
    if (v > dfloor_ + 1) M += v - dfloor_ - 1;
  }
  return M;
}

std::string BlockProfile::to_string() const {
  std::string s = "n=(";
  for (std::size_t i = 0; i < n_.size(); ++i) s += (i ? "," : "") + std::to_string(n_[i]);
  return s + ") N=" + std::to_string(N_) + " delta=" + delta_.get_str();
}

ClearingIntegers clearing_integers(const HeineInstance& inst) {
  ClearingIntegers ci;
  ci.A = denominator_lcm(inst.alphas());
  std::vector<FieldElement> pq = inst.P().coeffs();
  for (const auto& Q : inst.Qs()) pq.insert(pq.end(), Q.coeffs().begin(), Q.coeffs().end());
  ci.B = denominator_lcm(pq);
  return ci;
}

std::vector<SystemRow> build_system_serial(const HeineInstance& inst, const BlockProfile& profile,
                                           const std::vector<SeriesPrefix>& prefixes) {
  check_feasible(profile);
  check_prefixes(inst, profile, prefixes);
  ClearingIntegers ci = clearing_integers(inst);
  std::vector<SystemRow> rows;
  for (const RowSpec& spec : row_specs(profile)) rows.push_back(make_row(inst, profile, prefixes[spec.i], ci, spec));
  return rows;
}

std::vector<SystemRow> build_system(const HeineInstance& inst, const BlockProfile& profile,
                                    const std::vector<SeriesPrefix>& prefixes) {
  check_feasible(profile);
  check_prefixes(inst, profile, prefixes);
  ClearingIntegers ci = clearing_integers(inst);
  std::vector<RowSpec> specs = row_specs(profile);
  std::vector<SystemRow> rows(specs.size());
  parallel_for(specs.size(), [&](std::size_t r) { rows[r] = make_row(inst, profile, prefixes[specs[r].i], ci, specs[r]); });
  return rows;
}

std::vector<SystemRow> build_system(const HeineInstance& inst, const BlockProfile& profile) {
  unsigned top = 0;
  for (std::size_t i = 0; i < profile.m(); ++i) top = std::max(top, profile.Ni(i));
  return build_system(inst, profile, prefixes_for(inst, top));
}

SmallSolution small_solution(const Field& field, const std::vector<SystemRow>& rows, std::size_t unknowns) {
  if (rows.size() >= unknowns) throw ValidationError("small_solution needs fewer equations than unknowns");
  const std::size_t width = field.is_rational() ? 1 : 2;
  SmallSolution sol;

  std::vector<std::vector<RingElement>> ring_rows;
  ring_rows.reserve(rows.size());
  Integer max_norm = 0;
  for (const auto& r : rows) {
    if (r.entries.size() != unknowns) throw ValidationError("system row has the wrong length");
    ring_rows.push_back(r.entries);
    for (const auto& e : r.entries) max_norm = std::max(max_norm, e.norm());
  }
  sol.log2_max_coeff = 0.5 * log2_integer(max_norm);

  std::vector<lattice::IntVec> zrows = lattice::expand_rows(field, ring_rows);
  for (auto& row : zrows) {
    Integer g = 0;
    for (const auto& x : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g > 1) {
      for (auto& x : row) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    }
  }
  const lattice::BlockForm form = lattice::BlockForm::ring_norm(field);
  std::vector<lattice::IntVec> basis = lattice::integer_kernel(zrows, unknowns * width, form, &sol.lll);
  if (basis.empty()) throw InconsistencyError("system has only the trivial solution");
  sol.kernel_rank = basis.size() / width;

  Integer best_len = -1;
  std::string best_key;
  const std::vector<RingElement> unit_list = units(field);
  for (const auto& v : basis) {
    Integer len = form.inner(v, v);
    if (best_len >= 0 && len > best_len) continue;
    std::vector<RingElement> a = lattice::collapse(field, v);
    for (const auto& u : unit_list) {
      std::string key;
      std::vector<RingElement> ua;
      ua.reserve(a.size());
      for (const auto& x : a) {
        ua.push_back(x * u);
        key += ua.back().to_string();
        key += ',';
      }
      if (best_len < 0 || len < best_len || key < best_key) {
        best_len = len;
        best_key = key;
        sol.a = std::move(ua);
      }
    }
  }

  Integer amax = 0;
  for (const auto& x : sol.a) amax = std::max(amax, x.norm());
  sol.log2_max_a = 0.5 * log2_integer(amax);
  const double B = static_cast<double>(unknowns);
  const double M = static_cast<double>(rows.size());
  sol.log2_siegel_target = M / (B - M) * (std::log2(B) + sol.log2_max_coeff);
  return sol;
}

Rational gamma1(unsigned m, const Rational& delta) {
  Rational md = delta * m;
  Rational two_minus = Rational(2) - md;
  Rational g = two_minus * two_minus * (Rational(1) - md) / (Rational(2) * md);
  g.canonicalize();
  return g;
}

PadeTriple assemble(const HeineInstance& inst, const BlockProfile& profile, const SmallSolution& sol,
                    std::vector<SeriesPrefix>& prefixes) {
  const Field& K = inst.field();
  const unsigned N = profile.N();
  if (sol.a.size() != N + 1) throw ValidationError("solution length must be N + 1");
  if (std::all_of(sol.a.begin(), sol.a.end(), [](const RingElement& x) { return x.is_zero(); })) {
    throw ValidationError("solution vector is zero");
  }
  check_prefixes(inst, profile, prefixes);

  // A(z) = sum a_mu q^{-mu(mu-1)/2} z^mu
  std::vector<FieldElement> acoef;
  acoef.reserve(N + 1);
  for (unsigned mu = 0; mu <= N; ++mu) {
    acoef.push_back(FieldElement(sol.a[mu]) * inst.q().pow(-static_cast<long>(mu) * (static_cast<long>(mu) - 1) / 2));
  }
  PadeTriple pt{profile, sol.a, Poly(K, acoef), {}, {}, {}, clearing_integers(inst), {}, sol};

  // a^{N(N-1)/2} A(z) in Z_K[z]
  const FieldElement a_elem(inst.a());
  {
    Poly scaled = pt.A * a_elem.pow(static_cast<long>(N) * (N - 1) / 2);
    if (!scaled.all_integral()) throw InconsistencyError("a^{N(N-1)/2} A(z) is not integral");
  }
  const FieldElement P0 = inst.P().coeff(0);
  const FieldElement b_clear = a_elem.pow(static_cast<long>(N) * (N + 1) / 2) *
                               (FieldElement(K, Integer(pt.clearing.A * pt.clearing.B * pt.clearing.B)) * P0).pow(N + 1);

  for (std::size_t i = 0; i < profile.m(); ++i) {
    const unsigned Ni = profile.Ni(i);
    const unsigned k_cap = Ni + 2 * N;
    if (prefixes[i].f.size() <= k_cap) extend_series(inst, prefixes[i], k_cap);
    const auto& f = prefixes[i].f;
    std::vector<FieldElement> b(k_cap + 1, FieldElement(K));
    for (unsigned k = 0; k <= k_cap; ++k) {
      FieldElement acc(K);
      for (unsigned mu = 0; mu <= N && mu <= k; ++mu) {
        if (acoef[mu].is_zero()) continue;
        acc += acoef[mu] * f[k - mu];
      }
      b[k] = std::move(acc);
    }
    for (unsigned k = N + 1; k < Ni; ++k) {
      if (!b[k].is_zero()) {
        throw InconsistencyError("order of vanishing violated: b_{" + std::to_string(i + 1) + "," + std::to_string(k) +
                                 "} != 0");
      }
    }
    unsigned order = k_cap + 1;
    for (unsigned k = N + 1; k <= k_cap; ++k) {
      if (!b[k].is_zero()) {
        order = k;
        break;
      }
    }
    Poly Bi(K, std::vector<FieldElement>(b.begin(), b.begin() + N + 1));
    if (!(Bi * b_clear).all_integral()) {
      throw InconsistencyError("a^{N(N+1)/2}(AB^2P_0)^{N+1} B_" + std::to_string(i + 1) + " is not integral");
    }
    pt.B.push_back(std::move(Bi));
    pt.R.push_back(Remainder{Ni, k_cap, std::vector<FieldElement>(b.begin() + Ni, b.end())});
    pt.verified_order.push_back(order);
  }

  // Constants.
  PadeConstants& c = pt.constants;
  c.C1 = 0;
  for (std::size_t i = 0; i < profile.m(); ++i) c.C1 = std::max(c.C1, prefixes[i].C1);
  Interval aq = abs_iv(inst.q());
  c.sigma = iv(0);
  for (unsigned mu = 0; mu <= N; ++mu) c.sigma += iv(1) / aq.pow(static_cast<unsigned long>(mu) * (mu > 0 ? mu - 1 : 0) / 2);
  c.amax = iv(0);
  for (const auto& x : sol.a) c.amax = max_upper(c.amax, abs_iv(FieldElement(x)));
  Interval C1 = Interval::from_rational(c.C1, kPrec);
  Interval p0 = abs_iv(P0);
  Interval p0max = max_upper(p0, iv(1));
  // |coeff| <= (AB^2)^k |b|^{k(k+1)/2} |P_0|^{k+1} C_1^{nu+1} |q|^{...}: C_4 = AB^2 max(1,|P_0|)^2 C_1^2.
  c.C4 = Interval::from_integer(pt.clearing.A * pt.clearing.B * pt.clearing.B, kPrec) * p0max.square() * C1.square();
  c.C5 = c.C4 * abs_iv(a_elem).sqrt();
  c.C6 = max_upper(c.C5, iv(1)).square();
  c.log2_C7 = sol.log2_siegel_target / N;
  c.C8 = C1;
  unsigned Nmax = 0;
  for (std::size_t i = 0; i < profile.m(); ++i) Nmax = std::max(Nmax, profile.Ni(i));
  c.C9 = (iv(2) * C1.pow(Nmax + 1) * c.sigma).root(N);
  return pt;
}

PadeTriple build_pade(const HeineInstance& inst, const BlockProfile& profile) {
  unsigned top = 0;
  for (std::size_t i = 0; i < profile.m(); ++i) top = std::max(top, profile.Ni(i));
  std::vector<SeriesPrefix> prefixes = prefixes_for(inst, top);
  std::vector<SystemRow> rows = build_system(inst, profile, prefixes);
  SmallSolution sol = small_solution(inst.field(), rows, profile.N() + 1);
  for (const auto& row : rows) {
    RingElement acc(inst.field(), 0);
    for (std::size_t mu = 0; mu < row.entries.size(); ++mu) acc += row.entries[mu] * sol.a[mu];
    if (!acc.is_zero()) throw InconsistencyError("solver returned a vector with non-zero residual");
  }
  return assemble(inst, profile, sol, prefixes);
}

Interval PadeTriple::remainder_bound(std::size_t i, const FieldElement& z) const {
  Interval C1 = Interval::from_rational(constants.C1, kPrec);
  Interval az = abs_iv(z);
  if ((C1 * az).upper_rational() > Rational(1, 2)) {
    throw ValidationError("remainder bound needs C_1 |z| <= 1/2");
  }
  const unsigned Ni = R.at(i).order;
  return iv(2) * C1.pow(Ni + 1) * constants.amax * constants.sigma * az.pow(Ni);
}

ComplexBox remainder_value(const HeineInstance& inst, const PadeTriple& pt, std::size_t i, const FieldElement& z,
                           unsigned max_bits) {
  const FieldElement Az = pt.A.eval(z);
  const FieldElement Bz = pt.B.at(i).eval(z);
  ComplexBox out;
  for (unsigned bits = 128;; bits *= 2) {
    const auto prec = static_cast<mpfr_prec_t>(bits + 32);
    ComplexBox f = eval_f(inst, i, z, bits);
    out = to_box(Az, prec) * f - to_box(Bz, prec);
    if (!out.contains_zero() || bits >= max_bits) return out;
  }
}

nlohmann::json to_json(const PadeTriple& pt) {
  using nlohmann::json;
  json j;
  j["profile"] = {{"m", pt.profile.m()},
                  {"n", pt.profile.blocks()},
                  {"N", pt.profile.N()},
                  {"delta", pt.profile.delta().get_str()},
                  {"equations", pt.profile.equations()}};
  json a = json::array();
  for (const auto& x : pt.a) a.push_back(x.to_string());
  j["a"] = a;
  json B = json::array();
  for (const auto& b : pt.B) {
    json cs = json::array();
    for (const auto& c : b.coeffs()) cs.push_back(c.to_string());
    B.push_back(cs);
  }
  j["B"] = B;
  json orders = json::array();
  for (std::size_t i = 0; i < pt.R.size(); ++i) {
    orders.push_back({{"N_i", pt.R[i].order}, {"verified_order", pt.verified_order[i]}, {"k_cap", pt.R[i].k_cap}});
  }
  j["remainders"] = orders;
  const PadeConstants& c = pt.constants;
  j["clearing"] = {{"A", pt.clearing.A.get_str()}, {"B", pt.clearing.B.get_str()}};
  j["constants"] = {{"C1", c.C1.get_str()},
                    {"C1_formula", "(|alpha_i| + sum_{l>=1} |P_l||q|^{1-l} + max|Q_nu|)/|P_0| + 1, max over i"},
                    {"sigma", c.sigma.to_dyadic_string()},
                    {"log2_amax", c.amax.upper() > 0 ? std::log2(c.amax.upper()) : 0.0},
                    {"C4", c.C4.to_dyadic_string()},
                    {"C5", c.C5.to_dyadic_string()},
                    {"C6", c.C6.to_dyadic_string()},
                    {"log2_C7_cK1", c.log2_C7},
                    {"C8", c.C8.to_dyadic_string()},
                    {"C9", c.C9.to_dyadic_string()}};
  j["solver"] = {{"kernel_rank", pt.solution.kernel_rank},
                 {"lll_swaps", pt.solution.lll.swaps},
                 {"lll_reductions", pt.solution.lll.reductions},
                 {"log2_max_a", pt.solution.log2_max_a},
                 {"log2_max_coeff", pt.solution.log2_max_coeff},
                 {"log2_siegel_target_cK1", pt.solution.log2_siegel_target}};
  return j;
}

}  // namespace heine
