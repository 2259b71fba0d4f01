#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gen.hpp"
#include "instances.hpp"
#include "heine/errors.hpp"
#include "heine/expo.hpp"

using namespace heine;
using heine::testing::Gen;
namespace ht = heine::testing;

namespace {

Interval iv(long p, long q = 1) { return exact_interval(Rational(p, q)); }

// mu(rho) at delta_0 = 1/2 in long double, straight from the gamma_i.
long double mu_of_rho(unsigned m, unsigned s, long double g, long double r) {
  const long double d0 = 0.5L, rd = r + d0;
  const long double g1 = 9.0L / 8.0L;
  const long double g2 = g1 + r + d0 + (1 + s * rd * rd) / 2;
  const long double g3 = g1 + 0.5L + d0 * r / m;
  const long double g4 = g3 + g * rd * (1 - d0 / m + s * rd / 2);
  const long double g5 = r - g * rd;
  return g2 / (g5 - m * g4);
}

// Golden-section minimum of mu over rho, started past the pole.
long double argmin_mu(unsigned m, unsigned s, long double g) {
  long double lo = 13.0L * m / 4;
  while (!(mu_of_rho(m, s, g, lo) > 0)) lo += 0.25L;
  // For gamma > 0 the denominator turns negative again at large rho.
  long double hi = lo;
  while (hi < 400 && mu_of_rho(m, s, g, hi + 0.25L) > 0) hi += 0.25L;
  const long double phi = (std::sqrt(5.0L) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const long double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (mu_of_rho(m, s, g, a) < mu_of_rho(m, s, g, b)) hi = b; else lo = a;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST(Gammas, HalfGivesNineEighths) {
  auto p = gammas(1, 1, Rational(0), Rational(1, 2), Rational(9));
  EXPECT_EQ(p.g.g1, Rational(9, 8));
  EXPECT_EQ(gammas(2, 3, Rational(1, 7), Rational(1, 5), Rational(10)).g.g1, Rational(162, 25));
}

TEST(Gammas, ZeroGammaDegenerates) {
  Gen g(0xe1);
  for (int t = 0; t < 50; ++t) {
    const unsigned m = static_cast<unsigned>(g.range(1, 5)), s = static_cast<unsigned>(g.range(1, 5));
    Rational d0(g.range(1, 9), 10), r0(g.range(1, 400), g.range(1, 7));
    d0.canonicalize();
    r0.canonicalize();
    auto p = gammas(m, s, Rational(0), d0, r0);
    EXPECT_EQ(p.g.g4, p.g.g3);
    EXPECT_EQ(p.g.g5, r0);
  }
}

// At delta_0 = 1/2: 8 gamma_2 and 8 (gamma_5 - m gamma_4) are the numerator and
// denominator polynomials of mu.
TEST(Gammas, HalfDeltaPolynomialIdentities) {
  Gen g(0xe2);
  for (int t = 0; t < 100; ++t) {
    const long m = g.range(1, 5), s = g.range(1, 5);
    Rational r(g.range(1, 2000), g.range(1, 50)), gam(g.range(0, 99), 100);
    r.canonicalize();
    gam.canonicalize();
    auto p = gammas(static_cast<unsigned>(m), static_cast<unsigned>(s), gam, Rational(1, 2), r);
    Rational N = 4 * s * r * r + 4 * (s + 2) * r + s + 17;
    Rational D = 4 * r - 13 * m - gam * (4 * m * s * r * r + 4 * (2 * m + m * s + 1) * r + 4 * m + m * s + 2);
    EXPECT_EQ(Rational(8 * p.g.g2), N);
    EXPECT_EQ(Rational(8 * (p.g.g5 - m * p.g.g4)), D);
    EXPECT_EQ(p.admissible, D > 0);
  }
}

TEST(Gammas, Validation) {
  EXPECT_THROW(gammas(1, 1, Rational(0), Rational(0), Rational(9)), ValidationError);
  EXPECT_THROW(gammas(1, 1, Rational(0), Rational(1), Rational(9)), ValidationError);
  EXPECT_THROW(gammas(1, 1, Rational(1), Rational(1, 2), Rational(9)), ValidationError);
  EXPECT_THROW(gammas(1, 1, Rational(0), Rational(1, 2), Rational(0)), ValidationError);
  EXPECT_THROW(gammas(0, 1, Rational(0), Rational(1, 2), Rational(9)), ValidationError);
}

TEST(Gammas, BoundFlags) {
  // m (gamma_1 + 1/2) / (1 - delta_0) = 13/4 at m = 1, delta_0 = 1/2.
  EXPECT_TRUE(gammas(1, 1, Rational(0), Rational(1, 2), Rational(14, 4)).bound_rho);
  EXPECT_FALSE(gammas(1, 1, Rational(0), Rational(1, 2), Rational(13, 4)).bound_rho);
  auto p = gammas(1, 1, Rational(1, 100), Rational(1, 2), Rational(9));
  EXPECT_TRUE(p.bound_gamma);
  EXPECT_TRUE(p.admissible);
  auto bad = gammas(1, 1, Rational(1, 2), Rational(1, 2), Rational(9));
  EXPECT_FALSE(bad.bound_gamma);
  EXPECT_FALSE(bad.admissible);
}

TEST(Rho0, ReferenceValue) {
  Interval r = rho0(1, 1, iv(0));
  EXPECT_NEAR(r.mid(), 8.231214711292818, 1e-14);
  EXPECT_LT(r.width().upper(), 1e-40);
}

TEST(Rho0, MinimizesMu) {
  Gen g(0xe3);
  for (int t = 0; t < 30; ++t) {
    const unsigned m = static_cast<unsigned>(g.range(1, 5)), s = static_cast<unsigned>(g.range(1, 5));
    const long gn = g.range(0, 5);  // gamma in [0, 5e-4], admissible for m, s <= 5
    Interval r = rho0(m, s, iv(gn, 10000));
    const long double oracle = argmin_mu(m, s, gn / 10000.0L);
    EXPECT_NEAR(r.mid(), static_cast<double>(oracle), 1e-6) << m << "," << s;
    EXPECT_GT(r.lower(), 13.0 * m / 4);
    EXPECT_LT(rho0_residual(m, s, iv(gn, 10000)), 1e-30);
    EXPECT_LT(rho0_stationarity(m, s, iv(gn, 10000)), 1e-25);
  }
}

TEST(Rho0, RejectsGammaOutsideUnitInterval) {
  EXPECT_THROW(rho0(1, 1, iv(1)), ValidationError);
  EXPECT_THROW(rho0(1, 1, iv(-1, 10)), ValidationError);
}

TEST(Mu, FormsAgreeAndZeroGammaValue) {
  for (unsigned m = 1; m <= 5; ++m) {
    for (unsigned s = 1; s <= 5; ++s) {
      MuResult r = mu(m, s, iv(0));
      EXPECT_TRUE(r.forms_agree);
      // gamma = 0: mu = N'/D' at the stationary point = 2 s rho_0 + s + 2.
      EXPECT_NEAR(r.mu.mid(), 2.0 * s * r.rho0.mid() + s + 2, 1e-12);
      EXPECT_NEAR(r.mu.mid(), static_cast<double>(mu_of_rho(m, s, 0, r.rho0.mid())), 1e-9);
    }
  }
  MuResult r = mu(1, 1, iv(0));
  EXPECT_GT(r.mu.lower(), 19.45);
  EXPECT_LT(r.mu.upper(), 19.48);
}

TEST(Mu, InadmissibleGammaThrows) {
  EXPECT_THROW(mu(1, 1, iv(3, 10)), ValidationError);
  EXPECT_NO_THROW(mu(1, 1, iv(2, 100)));
}

TEST(Gamma, ThresholdOneOne) {
  GammaThreshold g = gamma_threshold(1, 1);
  EXPECT_GT(g.lo.get_d(), 0.0482);
  EXPECT_LT(g.hi.get_d(), 0.0492);
  EXPECT_LE(g.width, 1e-12);
  EXPECT_TRUE(g.f_lo.positive());
  EXPECT_TRUE(g.f_hi.negative());
  EXPECT_TRUE(g.f_zero.positive());
  EXPECT_NEAR(g.f_zero.mid(), 0.0486314938, 1e-9);
  // mu blows up as gamma approaches Gamma from below.
  EXPECT_GT(mu(1, 1, exact_interval(g.lo - Rational(1, 100000))).mu.mid(), 1000.0);
}

TEST(Gamma, SignsAtEndpoints) {
  for (unsigned m = 1; m <= 5; ++m) {
    for (unsigned s = 1; s <= 5; ++s) {
      EXPECT_TRUE(f_tau(m, s, iv(0)).positive()) << m << "," << s;
      EXPECT_TRUE(f_tau(m, s, iv(999, 1000)).negative()) << m << "," << s;
    }
  }
}

TEST(Gamma, ThresholdDecreasesInMAndS) {
  double prev_m = 1;
  for (unsigned m = 1; m <= 4; ++m) {
    double prev_s = 1;
    for (unsigned s = 1; s <= 4; ++s) {
      const double G = gamma_threshold(m, s, 2000, 1e-10).enclosure().mid();
      EXPECT_LT(G, prev_s);
      if (s == 1) {
        EXPECT_LT(G, prev_m);
        prev_m = G;
      }
      prev_s = G;
    }
  }
}

TEST(Gamma, ParallelScanMatchesSerial) {
  for (auto [m, s] : {std::pair{1u, 1u}, {2u, 3u}, {5u, 5u}}) {
    EXPECT_EQ(f_sign_scan(m, s, 1500), f_sign_scan_serial(m, s, 1500));
    auto a = gamma_threshold(m, s, 1500), b = gamma_threshold_serial(m, s, 1500);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
  }
  EXPECT_THROW(gamma_threshold(1, 1, 1), ValidationError);
}

TEST(Gamma, RowAndCsv) {
  auto th = gamma_threshold(1, 1, 1000);
  auto ok = exponent_row(1, 1, iv(0), th);
  EXPECT_TRUE(ok.admissible);
  EXPECT_NEAR(ok.mu, 19.4624294, 1e-6);
  auto bad = exponent_row(1, 1, iv(1, 10), th);
  EXPECT_FALSE(bad.admissible);
  EXPECT_TRUE(std::isnan(bad.mu));
  EXPECT_EQ(csv_header(), "m,s,gamma,rho0,mu,Gamma,admissible");
  EXPECT_NE(to_csv(bad).find(",,"), std::string::npos);
  EXPECT_EQ(to_csv(ok).substr(0, 6), "1,1,0,");
}

// Not claimed in general: violations are printed, not asserted.
TEST(Mu, IncreasingInGammaReport) {
  std::size_t violations = 0;
  for (unsigned m = 1; m <= 3; ++m) {
    for (unsigned s = 1; s <= 3; ++s) {
      const double top = gamma_threshold(m, s, 1000, 1e-9).lo.get_d();
      double prev = -1;
      for (int k = 0; k < 20; ++k) {
        const double g = top * k / 20;
        const double v = mu(m, s, Interval::from_double(g, kExpoPrecision)).mu.mid();
        if (v <= prev) {
          ++violations;
          std::printf("mu not increasing at m=%u s=%u gamma=%.6f\n", m, s, g);
        }
        prev = v;
      }
    }
  }
  RecordProperty("monotonicity_violations", static_cast<int>(violations));
}

TEST(GammaOf, Instances) {
  EXPECT_EQ(gamma_of(ht::tschakaloff(3)).mid(), 0.0);
  EXPECT_NEAR(gamma_of(ht::rational_q(5, 2)).mid(), std::log(2.0) / std::log(5.0), 1e-15);
  EXPECT_NEAR(gamma_of(ht::rational_q(100, 3)).mid(), 0.2386, 1e-4);
  Integer big = Integer(1) << 64;
  EXPECT_NEAR(gamma_of(ht::rational_q(big, 3)).mid(), std::log(3.0) / (64 * std::log(2.0)), 1e-15);
}

TEST(DefaultRho, Rules) {
  EXPECT_EQ(default_rho(2, 1, Rational(1, 5), iv(0)), Rational(142, 15));
  Rational r = default_rho(1, 1, Rational(1, 2), iv(0));
  EXPECT_EQ(r, Rational(559, 64));
  Rational r0 = r - Rational(1, 2);
  EXPECT_GE(r0.get_d(), rho0(1, 1, iv(0)).upper());
  EXPECT_LT(Rational(r0 - Rational(1, 64)).get_d(), rho0(1, 1, iv(0)).lower());
}

namespace {

Exponents reference_exponents() {
  Interval r = rho0(1, 1, iv(0));
  return exponents(1, 1, iv(0), Rational(1, 2), r.upper_rational());
}

}  // namespace

TEST(MatalaAho, EpsilonDecaysAndConstantsArePositive) {
  const Exponents e = reference_exponents();
  const double la = std::log(2.0);
  const EffectiveConstants c{1.5, 2.0, 3.0};
  MatalaAho ma = matala_aho(e, la, c);
  EXPECT_NEAR(ma.g6, e.g2 * la, 1e-12);
  EXPECT_NEAR(ma.g8 - ma.g9, e.margin() * la, 1e-12);
  EXPECT_GT(ma.A, 0);
  EXPECT_GT(ma.B, 0);
  EXPECT_NEAR(ma.F1_log, -ma.B - std::log(2.0), 1e-12);
  double prev = ma.epsilon(1.0);
  for (double lh : {10.0, 1e2, 1e4, 1e8}) {
    const double eps = ma.epsilon(lh);
    EXPECT_LT(eps, prev);
    EXPECT_NEAR(eps * std::sqrt(lh), ma.A, 1e-9 * ma.A);
    prev = eps;
  }
  EXPECT_THROW(ma.epsilon(0), ValidationError);
  // Unit constants: A = (g6 m^2 g9 / w + 2 m g6) / sqrt(w).
  MatalaAho unit = matala_aho(e, la, EffectiveConstants{0, 0, 1});
  const double w = unit.g8 - unit.g9;
  EXPECT_NEAR(unit.A, (unit.g6 * unit.g9 / w + 2 * unit.g6) / std::sqrt(w), 1e-12);
}

TEST(MatalaAho, RejectsInadmissible) {
  Exponents e = exponents(1, 1, iv(1, 2), Rational(1, 2), Rational(9));
  EXPECT_THROW(matala_aho(e, std::log(2.0), EffectiveConstants{}), ValidationError);
}

TEST(Thresholds, DominantTermAndH0) {
  const Exponents e = reference_exponents();
  const double la = std::log(2.0);
  Gen g(0xe4);
  for (int t = 0; t < 40; ++t) {
    const EffectiveConstants c{g.range(0, 400) / 10.0, g.range(0, 400) / 10.0, static_cast<double>(g.range(1, 200))};
    const double eps = g.range(1, 60) / 100.0;
    Thresholds th = thresholds(e, la, eps, c);
    EXPECT_EQ(th.S0, *std::max_element(th.terms, th.terms + 6));
    EXPECT_EQ(th.S0, th.terms[th.dominant]);
    // The harness height at H_0 gives S = S_0 + m.
    BlockSizes b = block_sizes(e, la, {th.log_H0}, eps, th);
    EXPECT_NEAR(b.S, th.S0 + e.m, 1e-9 * (th.S0 + e.m));
  }
  EXPECT_THROW(thresholds(e, la, 0, EffectiveConstants{}), ValidationError);
  EXPECT_THROW(thresholds(e, la, e.margin(), EffectiveConstants{}), ValidationError);
}

TEST(BlockSizes, SumsToSAndIsSymmetric) {
  Interval gam = iv(0);
  Exponents e = exponents(2, 1, gam, Rational(2, 5), Rational(127, 15));
  ASSERT_GT(e.margin(), 0);
  const double la = std::log(3.0);
  const double eps = default_epsilon(e);
  Thresholds th = thresholds(e, la, eps, EffectiveConstants{});
  Gen g(0xe5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> lh{g.range(1, 100000) / 10.0, g.range(1, 100000) / 10.0};
    BlockSizes b = block_sizes(e, la, lh, eps, th);
    EXPECT_NEAR(b.s_i[0] + b.s_i[1], b.S, 1e-9 * b.S);
    EXPECT_EQ(b.n[0] + b.n[1], b.N);
    EXPECT_LE(b.N, b.S + 1e-9);
    BlockSizes r = block_sizes(e, la, {lh[1], lh[0]}, eps, th);
    EXPECT_EQ(r.n[0], b.n[1]);
    EXPECT_EQ(r.n[1], b.n[0]);
    EXPECT_FALSE(b.above_H0);  // desk-scale heights
  }
  EXPECT_THROW(block_sizes(e, la, {1.0}, eps, th), ValidationError);
}

TEST(DefaultEpsilon, Rule) {
  const Exponents e = reference_exponents();
  EXPECT_DOUBLE_EQ(default_epsilon(e), std::min(0.5, e.margin() / 4));
  EXPECT_EQ(default_epsilon(exponents(1, 1, iv(1, 2), Rational(1, 2), Rational(9))), 0.0);
}
