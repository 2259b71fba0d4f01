#include "heine/expo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "heine/errors.hpp"
#include "heine/parallel.hpp"
#include "heine/qdiff.hpp"

namespace heine {

namespace {

Interval R(const Rational& v) { return Interval::from_rational(v, kExpoPrecision); }
Interval R(long n, long d = 1) { return R(Rational(n, d)); }

double upper_abs(const Interval& v) { return std::max(std::fabs(v.lower()), std::fabs(v.upper())); }

template <typename T, typename Lift>
GammaSet<T> gamma_formulas(unsigned m, unsigned s, const T& gamma, const T& d0, const T& r0, Lift lift) {
  const T one = lift(1, 1), two = lift(2, 1), half = lift(1, 2);
  const T M = lift(m, 1), S = lift(s, 1);
  const T rd = r0 + d0;
  GammaSet<T> g;
  g.g1 = (two - d0) * (two - d0) * (one - d0) / (two * d0);
  g.g2 = g.g1 + r0 + d0 + (one + S * rd * rd) * half;
  g.g3 = g.g1 + half + d0 * r0 / M;
  g.g4 = g.g3 + gamma * rd * (one - d0 / M + S * rd * half);
  g.g5 = r0 - gamma * rd;
  return g;
}

// (c, d) of the rho_0 quadratic rho^2 - 2c rho - d = 0.
std::pair<Interval, Interval> rho_cd(unsigned m, unsigned s, const Interval& gamma) {
  if (gamma.lower() < 0 || !gamma.certainly_less(R(1))) {
    throw ValidationError("rho_0 needs 0 <= gamma < 1 (rho_0 diverges as gamma -> 1)");
  }
  const Interval t = gamma / (R(2) * (R(1) - gamma));
  const long ml = m, sl = s;
  Interval c = R(13 * ml, 4) + t;
  Interval d = R(13 * ml * (sl + 2) + sl + 17, 4 * sl) + R(sl + 2, sl) * t;
  return {c, d};
}

struct MuParts {
  Interval num, den, dnum, dden;
};

MuParts mu_parts(unsigned m, unsigned s, const Interval& gamma, const Interval& r) {
  const long ml = m, sl = s;
  MuParts p;
  p.num = R(4 * sl) * r.square() + R(4 * (sl + 2)) * r + R(sl + 17);
  p.den = R(4) * r - R(13 * ml) -
          gamma * (R(4 * ml * sl) * r.square() + R(4 * (ml * sl + 2 * ml + 1)) * r + R(ml * sl + 4 * ml + 2));
  p.dnum = R(8 * sl) * r + R(4 * (sl + 2));
  p.dden = R(4) - gamma * (R(8 * ml * sl) * r + R(4 * (ml * sl + 2 * ml + 1)));
  return p;
}

int sign_of(const Interval& v) {
  if (v.positive()) return 1;
  if (v.negative()) return -1;
  return 0;
}

Interval tau_at(std::size_t k, std::size_t grid) {
  return R(Rational(static_cast<long>(k), static_cast<long>(grid)));
}

GammaThreshold finish_threshold(unsigned m, unsigned s, std::size_t grid, double width, const std::vector<int>& signs) {
  GammaThreshold g;
  g.m = m;
  g.s = s;
  g.grid = grid;
  if (signs.empty() || signs[0] != 1) throw InconsistencyError("f(0) > 0 could not be certified");
  std::size_t k = 1;
  for (; k < signs.size(); ++k) {
    if (signs[k] == -1) break;
    if (signs[k] != 1) throw InconsistencyError("sign of f not certified at grid point " + std::to_string(k));
  }
  if (k == signs.size()) throw InconsistencyError("no sign change of f on the scan grid");
  g.bracket = k;
  g.lo = Rational(static_cast<long>(k - 1), static_cast<long>(grid));
  g.hi = Rational(static_cast<long>(k), static_cast<long>(grid));
  g.lo.canonicalize();
  g.hi.canonicalize();
  const Rational target(width);
  while (g.hi - g.lo > target) {
    Rational mid = (g.lo + g.hi) / 2;
    mid.canonicalize();
    const int sg = sign_of(f_tau(m, s, R(mid)));
    if (sg == 0) break;  // resolution of the enclosure reached
    (sg > 0 ? g.lo : g.hi) = mid;
    ++g.bisection_steps;
  }
  g.f_lo = f_tau(m, s, R(g.lo));
  g.f_hi = f_tau(m, s, R(g.hi));
  g.f_zero = f_tau(m, s, R(0));
  g.width = Rational(g.hi - g.lo).get_d();
  if (!g.f_lo.positive() || !g.f_hi.negative()) throw InconsistencyError("Gamma bracket lost its sign change");
  return g;
}

}  // namespace

Interval exact_interval(const Rational& v) { return R(v); }

ExponentParams gammas(unsigned m, unsigned s, const Rational& gamma, const Rational& delta0, const Rational& rho0) {
  if (m == 0 || s == 0) throw ValidationError("m and s must be positive");
  if (!(delta0 > 0) || !(delta0 < 1)) throw ValidationError("delta_0 must lie in (0, 1)");
  if (!(rho0 > 0)) throw ValidationError("rho_0 must be positive");
  if (gamma < 0 || !(gamma < 1)) throw ValidationError("gamma must lie in [0, 1)");
  ExponentParams p;
  p.m = m;
  p.s = s;
  p.gamma = gamma;
  p.delta0 = delta0;
  p.rho0 = rho0;
  for (Rational* r : {&p.gamma, &p.delta0, &p.rho0}) r->canonicalize();
  p.g = gamma_formulas<Rational>(m, s, gamma, delta0, rho0, [](long n, long d) {
    Rational r(n, d);
    r.canonicalize();
    return r;
  });
  for (Rational* r : {&p.g.g1, &p.g.g2, &p.g.g3, &p.g.g4, &p.g.g5}) r->canonicalize();
  Rational rb = Rational(m) * (p.g.g1 + Rational(1, 2)) / (Rational(1) - delta0);
  rb.canonicalize();
  p.bound_rho = rho0 > rb;
  const Rational rd = rho0 + delta0;
  Rational gb = (rho0 - Rational(m) * p.g.g3) / (rd * (Rational(1) + Rational(s * m) * rd / 2 + Rational(m) - delta0));
  gb.canonicalize();
  p.bound_gamma = gamma < gb;
  p.admissible = p.g.g5 - Rational(m) * p.g.g4 > 0;
  return p;
}

GammaSet<Interval> gammas(unsigned m, unsigned s, const Interval& gamma, const Interval& delta0, const Interval& rho0) {
  return gamma_formulas<Interval>(m, s, gamma, delta0, rho0, [](long n, long d) { return R(n, d); });
}

Interval rho0(unsigned m, unsigned s, const Interval& gamma) {
  auto [c, d] = rho_cd(m, s, gamma);
  return c + (c.square() + d).sqrt();
}

double rho0_residual(unsigned m, unsigned s, const Interval& gamma) {
  auto [c, d] = rho_cd(m, s, gamma);
  const Interval r = c + (c.square() + d).sqrt();
  return upper_abs(r.square() - R(2) * c * r - d);
}

double rho0_stationarity(unsigned m, unsigned s, const Interval& gamma) {
  const Interval r = rho0(m, s, gamma);
  MuParts p = mu_parts(m, s, gamma, r);
  return upper_abs(p.dnum * p.den - p.num * p.dden);
}

MuResult mu(unsigned m, unsigned s, const Interval& gamma) {
  MuResult out;
  out.rho0 = rho0(m, s, gamma);
  MuParts p = mu_parts(m, s, gamma, out.rho0);
  out.denominator = p.den;
  if (!p.den.positive()) {
    throw ValidationError("gamma is not admissible: the denominator of mu is not positive");
  }
  out.mu = p.num / p.den;
  GammaSet<Interval> g = gammas(m, s, gamma, R(1, 2), out.rho0);
  Interval margin = g.g5 - R(static_cast<long>(m)) * g.g4;
  if (!margin.positive()) throw ValidationError("gamma is not admissible: gamma_5 - m gamma_4 <= 0");
  out.mu_ratio = g.g2 / margin;
  out.forms_agree = upper_abs(out.mu - out.mu_ratio) <= 1e-9;
  return out;
}

Interval f_tau(unsigned m, unsigned s, const Interval& tau) {
  const Interval r = rho0(m, s, tau);
  const long ml = m, sl = s;
  Interval num = R(4) * r - R(13 * ml);
  Interval den = R(4 * ml * sl) * r.square() + R(4 * (2 * ml + ml * sl + 1)) * r + R(4 * ml + ml * sl + 2);
  return num / den - tau;
}

std::vector<int> f_sign_scan(unsigned m, unsigned s, std::size_t grid) {
  std::vector<int> out(grid, 0);
  parallel_for(grid, [&](std::size_t k) { out[k] = sign_of(f_tau(m, s, tau_at(k, grid))); });
  return out;
}

std::vector<int> f_sign_scan_serial(unsigned m, unsigned s, std::size_t grid) {
  std::vector<int> out(grid, 0);
  for (std::size_t k = 0; k < grid; ++k) out[k] = sign_of(f_tau(m, s, tau_at(k, grid)));
  return out;
}

GammaThreshold gamma_threshold(unsigned m, unsigned s, std::size_t grid, double width) {
  if (grid < 2) throw ValidationError("scan grid needs at least two points");
  return finish_threshold(m, s, grid, width, f_sign_scan(m, s, grid));
}

GammaThreshold gamma_threshold_serial(unsigned m, unsigned s, std::size_t grid, double width) {
  if (grid < 2) throw ValidationError("scan grid needs at least two points");
  return finish_threshold(m, s, grid, width, f_sign_scan_serial(m, s, grid));
}

Interval GammaThreshold::enclosure() const { return Interval::from_endpoints(lo, hi, kExpoPrecision); }

ExponentRow exponent_row(unsigned m, unsigned s, const Interval& gamma, const GammaThreshold& threshold) {
  ExponentRow row;
  row.m = m;
  row.s = s;
  row.gamma = gamma.mid();
  row.rho0 = rho0(m, s, gamma).mid();
  row.Gamma = threshold.enclosure().mid();
  row.admissible = gamma.certainly_less(threshold.enclosure());
  row.mu = std::numeric_limits<double>::quiet_NaN();
  if (row.admissible) {
    try {
      row.mu = mu(m, s, gamma).mu.mid();
    } catch (const ValidationError&) {
      row.admissible = false;
    }
  }
  return row;
}

std::string csv_header() { return "m,s,gamma,rho0,mu,Gamma,admissible"; }

std::string to_csv(const ExponentRow& r) {
  char buf[256];
  if (std::isnan(r.mu)) {
    std::snprintf(buf, sizeof buf, "%u,%u,%.12g,%.12g,,%.12g,%s", r.m, r.s, r.gamma, r.rho0, r.Gamma,
                  r.admissible ? "true" : "false");
  } else {
    std::snprintf(buf, sizeof buf, "%u,%u,%.12g,%.12g,%.12g,%.12g,%s", r.m, r.s, r.gamma, r.rho0, r.mu, r.Gamma,
                  r.admissible ? "true" : "false");
  }
  return buf;
}

Exponents exponents(unsigned m, unsigned s, const Interval& gamma, const Rational& delta0, const Rational& rho0v) {
  GammaSet<Interval> g = gammas(m, s, gamma, R(delta0), R(rho0v));
  Exponents e;
  e.m = m;
  e.s = s;
  e.gamma = gamma.mid();
  e.delta0 = delta0.get_d();
  e.rho0 = rho0v.get_d();
  e.g1 = g.g1.mid();
  e.g2 = g.g2.mid();
  e.g3 = g.g3.mid();
  e.g4 = g.g4.mid();
  e.g5 = g.g5.mid();
  return e;
}

double MatalaAho::epsilon(double log_H) const {
  if (!(log_H > 0)) throw ValidationError("epsilon(H) needs H > 1");
  return A / std::sqrt(log_H);
}

MatalaAho matala_aho(const Exponents& e, double log_a, const EffectiveConstants& c) {
  MatalaAho r;
  const double m = e.m;
  r.g6 = e.g2 * log_a;
  r.g7 = std::max(0.0, c.log_C12);
  r.g8 = e.g5 * log_a;
  r.g9 = e.g4 * log_a;
  r.g10 = std::max(0.0, c.log_C13);
  const double w = r.g8 - m * r.g9;
  if (!(w > 0)) throw ValidationError("gamma_8 - m gamma_9 must be positive");
  const double t = m * m * r.g9 + m * r.g10;
  const double lead = r.g6 * t / w + 2 * m * r.g6 + r.g7;
  r.A = lead / std::sqrt(w);
  r.B = lead * (t / w + m * std::sqrt(r.g10 / w)) + m * m * r.g6 * r.g10 / w + m * m * r.g6 + m * r.g7;
  r.F1_log = -r.B - std::log(2.0);
  r.F2_log = c.C14 * c.C14 * w - c.C14 * t - m * m * r.g10;
  return r;
}

Thresholds thresholds(const Exponents& e, double log_a, double eps, const EffectiveConstants& c) {
  const double m = e.m;
  if (!(eps > 0) || !(eps < e.margin() / (2 * m))) {
    throw ValidationError("epsilon must satisfy 0 < epsilon < (gamma_5 - m gamma_4) / (2m)");
  }
  Thresholds t;
  t.terms[0] = c.log_C12 / log_a / eps;
  t.terms[1] = c.log_C13 / log_a / eps;
  t.terms[2] = std::log(2 * m) / log_a / eps;
  t.terms[3] = c.C14;
  t.terms[4] = e.g5 / (2 * eps);
  t.terms[5] = (m + 1) * e.g5 / eps + 1;
  t.dominant = static_cast<int>(std::max_element(t.terms, t.terms + 6) - t.terms);
  t.S0 = t.terms[t.dominant];
  t.log_H0 = (t.S0 + m) * (t.S0 + m) * (e.g5 - m * (e.g4 + 2 * eps)) * log_a;
  return t;
}

BlockSizes block_sizes(const Exponents& e, double log_a, const std::vector<double>& log_H, double eps,
                       const Thresholds& th) {
  const double m = e.m;
  if (log_H.size() != e.m) throw ValidationError("need one height per function");
  if (!(eps > 0) || !(eps < e.margin() / (2 * m))) {
    throw ValidationError("epsilon must satisfy 0 < epsilon < (gamma_5 - m gamma_4) / (2m)");
  }
  const double w = e.g5 - m * (e.g4 + 2 * eps);
  double lh = 0;
  for (double v : log_H) lh += v / log_a;
  BlockSizes b;
  b.S = std::sqrt(std::max(0.0, lh) / w);
  b.N = 0;
  for (double v : log_H) {
    const double si = b.S > 0 ? (v / log_a + b.S * b.S * (e.g4 + 2 * eps)) / (b.S * e.g5) : 0.0;
    b.s_i.push_back(si);
    b.n.push_back(static_cast<unsigned>(std::floor(si)));
    b.N += b.n.back();
  }
  const double delta = e.delta0 / m;
  b.n_exceeds_delta = true;
  for (unsigned v : b.n) b.n_exceeds_delta = b.n_exceeds_delta && v > delta * b.N;
  b.N_in_range = th.S0 < b.S - m && b.S - m < b.N && b.N <= b.S + 1e-9;
  b.above_H0 = lh * log_a > th.log_H0;
  return b;
}

Interval gamma_of(const HeineInstance& inst) {
  const Interval na = Interval::from_integer(inst.a().norm(), kExpoPrecision);
  const Interval nb = Interval::from_integer(inst.b().norm(), kExpoPrecision);
  if (inst.b().norm() == 1) return R(0);
  return nb.log() / na.log();
}

Rational default_rho(unsigned m, unsigned s, const Rational& delta, const Interval& gamma) {
  Rational d0 = delta * m;
  d0.canonicalize();
  Rational r0;
  if (d0 == Rational(1, 2)) {
    Rational up = rho0(m, s, gamma).upper_rational() * 64;
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), up.get_num_mpz_t(), up.get_den_mpz_t());
    r0 = Rational(c, 64);
  } else {
    Rational g1 = (2 - d0) * (2 - d0) * (1 - d0) / (2 * d0);
    r0 = Rational(m) * (g1 + Rational(1, 2)) / (1 - d0) + 1;
  }
  Rational rho = d0 + r0;
  rho.canonicalize();
  return rho;
}

double default_epsilon(const Exponents& e) {
  const double margin = e.margin();
  if (!(margin > 0)) return 0;
  return std::min(0.5, margin / (4.0 * e.m));
}

}  // namespace heine
