// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fit.hpp"
#include "instances.hpp"
#include "heine/chain.hpp"
#include "heine/errors.hpp"
#include "heine/expo.hpp"
#include "heine/harness.hpp"
#include "heine/pade.hpp"
#include "heine/qdiff.hpp"

using namespace heine;
using heine::testing::rat;
namespace ht = heine::testing;

namespace {

constexpr unsigned kEvalBits = 100;
constexpr double kSlopeSlack = 0.10;        // relative, on |bound|
constexpr double kRho0Lo = 8.2312151, kRho0Hi = 8.2312153;
constexpr double kMuLo = 19.45, kMuHi = 19.48;
constexpr double kFormsTol = 1e-9;
constexpr double kGammaLo = 0.0482, kGammaHi = 0.0492;
constexpr double kTauHigh = 0.999;
constexpr double kNuSlack = 0.5;
constexpr unsigned kChainBits = 128;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

using Criterion = std::function<void(Verdict&)>;

int run(int id, const char* title, double limit_s, const Criterion& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0) v.require(secs < limit_s, "runtime limit " + std::to_string(limit_s) + " s");
  std::printf("%s  %d  %-34s %8.2f s %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.str().c_str());
  std::fflush(stdout);
  return v.pass ? 0 : 1;
}

// Natural log of the upper endpoint of a non-negative interval; safe far
// below the double range.
double log_upper(const Interval& x) {
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, x.hi(), MPFR_RNDU);
  if (m <= 0) return -std::numeric_limits<double>::infinity();
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

double log_abs(const RingElement& x) { return log2_abs(FieldElement(x)) * std::log(2.0); }

// Exact order and integrality of one triple, rechecked from a fresh prefix.
void check_triple(Verdict& v, const HeineInstance& inst, const PadeTriple& pt, const std::string& tag) {
  const unsigned N = pt.profile.N();
  for (std::size_t i = 0; i < inst.m(); ++i) {
    const unsigned Ni = pt.profile.Ni(i);
    SeriesPrefix pre = series_coefficients(inst, i, Ni);
    const Poly Af = pt.A.mul_trunc(Poly(inst.field(), pre.f), Ni);
    v.require(Af.truncate(N) == pt.B[i], tag + " B_" + std::to_string(i + 1) + " is not the head of A f");
    bool tail_zero = true;
    for (unsigned k = N + 1; k < Ni; ++k) tail_zero = tail_zero && Af.coeff(k).is_zero();
    v.require(tail_zero && pt.verified_order[i] >= Ni, tag + " ord R_" + std::to_string(i + 1) + " < N_i");
  }
  const long n = N;
  const FieldElement a(inst.a());
  v.require((pt.A * a.pow(n * (n - 1) / 2)).all_integral(), tag + " a^{N(N-1)/2} A not integral");
  const auto& ci = pt.clearing;
  const FieldElement c = a.pow(n * (n + 1) / 2) *
                         (FieldElement(inst.field(), Integer(ci.A * ci.B * ci.B)) * inst.P().coeff(0)).pow(n + 1);
  for (std::size_t i = 0; i < pt.B.size(); ++i) {
    v.require((pt.B[i] * c).all_integral(), tag + " cleared B_" + std::to_string(i + 1) + " not integral");
  }
}

void check_chain(Verdict& v, const ChainResult& c, const std::string& tag) {
  v.require(c.forms.integrality_ok, tag + " D_k-integrality");
  v.require(c.certificate.nonzero, tag + " Delta_k = 0");
  v.require(c.certificate.factorization_matches && c.certificate.delta_k == c.certificate.factorized,
            tag + " Delta_k factorization");
  v.require(c.forms.routes_agree, tag + " r routes disagree");
  v.require(c.delta.lowest_matches, tag + " lowest Delta coefficient");
}

struct SlopeResult {
  double p_slope = 0, p_bound = 0;
  std::vector<double> r_slope, r_bound;
};

// Quadratic fits of max_j log|p_jk| and max_j log|r_jik| against N.
SlopeResult slopes(const HeineInstance& inst, const Rational& delta, const std::vector<unsigned>& Ns) {
  const unsigned m = static_cast<unsigned>(inst.m());
  const Interval gamma = gamma_of(inst);
  const Rational rho = default_rho(m, inst.s(), delta, gamma);
  Rational d0 = delta * m;
  d0.canonicalize();
  Rational r0 = rho - d0;
  r0.canonicalize();
  const Exponents e = exponents(m, inst.s(), gamma, d0, r0);
  const double log_a = log2_abs(FieldElement(inst.a())) * std::log(2.0);

  std::vector<double> xs, ps;
  std::vector<std::vector<double>> rs(m);
  std::vector<double> ratio(m, 0);
  for (unsigned N : Ns) {
    const auto prof = BlockProfile::balanced(m, N, delta);
    const auto pt = build_pade(inst, prof);
    const auto c = run_chain(inst, pt, rho, kChainBits);
    double pmax = -1e300;
    for (const auto& p : c.forms.p) pmax = std::max(pmax, log_abs(p));
    xs.push_back(N);
    ps.push_back(pmax);
    for (unsigned i = 0; i < m; ++i) {
      double rmax = -1e300;
      for (std::size_t j = 0; j <= m; ++j) rmax = std::max(rmax, log_upper(c.forms.r[j][i].modulus()));
      rs[i].push_back(rmax);
      ratio[i] = static_cast<double>(prof.n(i)) / N;  // constant over the grid for balanced profiles
    }
  }
  SlopeResult out;
  out.p_slope = ht::fit_quadratic(xs, ps).c2;
  out.p_bound = e.g2 * log_a;
  for (unsigned i = 0; i < m; ++i) {
    out.r_slope.push_back(ht::fit_quadratic(xs, rs[i]).c2);
    out.r_bound.push_back((e.g4 - e.g5 * ratio[i]) * log_a);
  }
  return out;
}

bool within_slack(double slope, double bound) { return slope <= bound + kSlopeSlack * std::fabs(bound); }

void check_slopes(Verdict& v, const SlopeResult& s, const std::string& tag) {
  char buf[160];
  std::snprintf(buf, sizeof buf, " %s p %.3f<=%.3f", tag.c_str(), s.p_slope, s.p_bound);
  v.detail << buf;
  v.require(within_slack(s.p_slope, s.p_bound), tag + " p slope");
  for (std::size_t i = 0; i < s.r_slope.size(); ++i) {
    std::snprintf(buf, sizeof buf, " r%zu %.3f<=%.3f", i + 1, s.r_slope[i], s.r_bound[i]);
    v.detail << buf;
    v.require(within_slack(s.r_slope[i], s.r_bound[i]), tag + " r slope " + std::to_string(i + 1));
  }
}

// Criteria 2 and 3 on one instance; returns the largest N's wall time.
void construct_and_certify(Verdict& v, const HeineInstance& inst, const Rational& delta,
                           const std::vector<unsigned>& Ns, const std::string& tag) {
  const unsigned m = static_cast<unsigned>(inst.m());
  const Rational rho = default_rho(m, inst.s(), delta, gamma_of(inst));
  for (unsigned N : Ns) {
    const auto pt = build_pade(inst, BlockProfile::balanced(m, N, delta));
    const std::string t = tag + " N=" + std::to_string(N);
    check_triple(v, inst, pt, t);
    check_chain(v, run_chain(inst, pt, rho, kChainBits), t);
  }
}

HeineInstance q5_2() { return ht::rational_q(5, 2, {rat(1), rat(2)}); }
HeineInstance q100_3() { return ht::rational_q(100, 3); }
HeineInstance q2e64_3() { return ht::rational_q(Integer(1) << 64, 3); }

}  // namespace

int main() {
  int failed = 0;

  failed += run(1, "series/equation consistency", 5, [](Verdict& v) {
    for (const auto& inst : {ht::tschakaloff(2), ht::qexp(3)}) {
      SeriesPrefix p = series_coefficients(inst, 0, 64);
      bool zero = true;
      for (const auto& r : equation_residual(inst, p, 64)) zero = zero && r.is_zero();
      v.require(zero, "residual through degree 64");
      const ComplexBox f = eval_f(inst, 0, inst.q(), kEvalBits);
      const ComplexBox phi = eval_phi(inst, inst.alpha_i(0), kEvalBits);
      v.require(f.overlaps(phi), "f(q) and phi(alpha) disjoint");
      const Interval tol = Interval::from_rational(Rational(Integer(1), Integer(1) << kEvalBits), 64) *
                           phi.modulus();
      v.require(f.re().width().certainly_less(tol) && phi.re().width().certainly_less(tol), "width above 2^-100");
    }
  });

  failed += run(2, "Pade order and integrality", 60, [](Verdict& v) {
    const auto inst = ht::reference_m2();
    for (unsigned N : {10u, 15u, 20u}) {
      const auto pt = build_pade(inst, BlockProfile::balanced(2, N, Rational(1, 5)));
      check_triple(v, inst, pt, "N=" + std::to_string(N));
    }
  });

  failed += run(3, "chain certificates", 0, [](Verdict& v) {
    const auto inst = ht::reference_m2();
    const Rational rho = default_rho(2, 1, Rational(1, 5), gamma_of(inst));
    for (unsigned N : {10u, 15u, 20u}) {
      const auto pt = build_pade(inst, BlockProfile::balanced(2, N, Rational(1, 5)));
      const auto c = run_chain(inst, pt, rho, kChainBits);
      check_chain(v, c, "N=" + std::to_string(N));
      v.detail << " k" << N << "=" << c.forms.k;
    }
  });

  failed += run(4, "decay slopes", 0, [](Verdict& v) {
    check_slopes(v, slopes(ht::reference_m2(), Rational(1, 5), {8, 12, 16, 20}), "q=3");
  });

  failed += run(5, "exponent calculus", 5, [](Verdict& v) {
    const Interval zero = Interval::from_double(0, kExpoPrecision);
    const Interval r0 = rho0(1, 1, zero);
    char buf[200];
    std::snprintf(buf, sizeof buf, " rho0=[%.12f,%.12f]", r0.lower(), r0.upper());
    v.detail << buf;
    v.require(r0.lower() >= kRho0Lo && r0.upper() <= kRho0Hi, "rho0 outside [8.2312151, 8.2312153]");
    const MuResult mr = mu(1, 1, zero);
    std::snprintf(buf, sizeof buf, " mu=%.10f", mr.mu.mid());
    v.detail << buf;
    v.require(mr.mu.lower() >= kMuLo && mr.mu.upper() <= kMuHi, "mu window");
    v.require(mr.forms_agree && (mr.mu - mr.mu_ratio).abs().upper() <= kFormsTol, "delta0 = 1/2 identity");
    const GammaThreshold g = gamma_threshold(1, 1);
    const Interval enc = g.enclosure();
    std::snprintf(buf, sizeof buf, " Gamma=[%.12f,%.12f]", enc.lower(), enc.upper());
    v.detail << buf;
    v.require(enc.lower() >= kGammaLo && enc.upper() <= kGammaHi, "Gamma window");
    v.require(g.f_lo.positive() && g.f_hi.negative(), "sign change not certified");
    const Interval high = Interval::from_rational(Rational(999, 1000), kExpoPrecision);
    for (unsigned m = 1; m <= 5; ++m) {
      for (unsigned s = 1; s <= 5; ++s) {
        v.require(f_tau(m, s, zero).positive(), "f(0) <= 0 at m=" + std::to_string(m) + " s=" + std::to_string(s));
        v.require(f_tau(m, s, high).negative(),
                  "f(" + std::to_string(kTauHigh) + ") >= 0 at m=" + std::to_string(m) + " s=" + std::to_string(s));
      }
    }
  });

  failed += run(6, "measure harness, box 200", 600, [](Verdict& v) {
    HarnessOptions o;
    o.box = {200};
    o.bits = 256;
    const MeasureReport r = measure(ht::tschakaloff(2), o);
    char buf[200];
    std::snprintf(buf, sizeof buf, " forms=%zu shells=%zu regimes=%zu", r.forms, r.shells.size(),
                  r.gr_regime_count);
    v.detail << buf;
    v.require(r.unresolved == 0 && r.all_resolved, "some |L| enclosure contains 0");
    v.require(r.fit.has_value(), "no exponent fit: " + r.fit_error);
    if (r.fit) {
      std::snprintf(buf, sizeof buf, " nu=%.3f mu=%.3f", r.fit->nu_hat, r.mu);
      v.detail << buf;
      v.require(r.fit->nu_hat <= r.mu + kNuSlack, "nu_hat > mu + 0.5");
    }
    v.require(r.gr_checked && r.gr_all_hold, "G/R bound violated");
    v.require(r.gr_regime_count > 0, "regime never reached");
  });

  failed += run(7, "gamma > 0 regression", 0, [](Verdict& v) {
    // q = 5/2: construction only.
    construct_and_certify(v, q5_2(), Rational(1, 5), {10, 15, 20}, "5/2");

    // q = 100/3, (m, s) = (1, 1): criteria 2-4, then admissibility must be false.
    const auto h = q100_3();
    construct_and_certify(v, h, Rational(1, 5), {10, 15, 20}, "100/3");
    check_slopes(v, slopes(h, Rational(1, 5), {8, 12, 16, 20}), "100/3");
    bool mu_rejected = false;
    try {
      mu(1, 1, gamma_of(h));
    } catch (const ValidationError&) {
      mu_rejected = true;
    }
    v.require(mu_rejected, "100/3 mu finite");
    HarnessOptions small;
    small.box = {6};
    const MeasureReport hr = measure(h, small);
    v.require(!hr.admissible && std::isnan(hr.mu), "100/3 reported admissible");

    // q = 2^64/3: admissible, finite mu, harness end to end.
    HarnessOptions o;
    o.box = {20};
    const MeasureReport r = measure(q2e64_3(), o);
    char buf[120];
    std::snprintf(buf, sizeof buf, " 2^64/3 gamma=%.4f mu=%.3f shells=%zu", r.gamma, r.mu, r.shells.size());
    v.detail << buf;
    v.require(r.admissible && std::isfinite(r.mu), "2^64/3 not admissible");
    v.require(r.all_resolved && !r.shells.empty(), "2^64/3 harness incomplete");
    v.require(r.gr_checked && r.gr_all_hold, "2^64/3 G/R bound violated");
  });

  std::printf("%d criteria failed\n", failed);
  return failed;
}
