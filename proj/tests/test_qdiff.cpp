#include <gtest/gtest.h>

#include "gen.hpp"
#include "heine/errors.hpp"
#include "heine/qdiff.hpp"

using namespace heine;
using heine::testing::Gen;

namespace {

const Field kQ = Field::rational();

FieldElement rat(long p, long q = 1) { return FieldElement(kQ, Rational(p, q)); }

Poly poly(const Field& f, std::initializer_list<FieldElement> cs) { return Poly(f, std::vector<FieldElement>(cs)); }

HeineInstance tschakaloff(long q, std::vector<FieldElement> alphas = {rat(1)}) {
  return HeineInstance::heine_system(kQ, RingElement(kQ, q), RingElement(kQ, 1), 1, poly(kQ, {rat(q)}),
                                     std::move(alphas));
}

HeineInstance qexp(long q, std::vector<FieldElement> alphas = {rat(1)}) {
  return HeineInstance::heine_system(kQ, RingElement(kQ, q), RingElement(kQ, 1), 1, poly(kQ, {rat(q), rat(-1)}),
                                     std::move(alphas));
}

// A spread of instances with Q_i = -P over Q and over quadratic fields.
std::vector<HeineInstance> heine_family() {
  std::vector<HeineInstance> out;
  out.push_back(tschakaloff(2));
  out.push_back(qexp(3));
  out.push_back(tschakaloff(3, {rat(1), rat(2)}));
  out.push_back(HeineInstance::heine_system(kQ, RingElement(kQ, 5), RingElement(kQ, 2), 1,
                                            poly(kQ, {rat(5, 2), rat(-1)}), {rat(2), rat(-1, 3)}));
  out.push_back(HeineInstance::heine_system(kQ, RingElement(kQ, 4), RingElement(kQ, 1), 2,
                                            poly(kQ, {rat(1), rat(1), rat(2)}), {rat(3)}));
  const Field g = Field::quadratic(-1);
  FieldElement qg(RingElement(g, 2, 1));
  out.push_back(HeineInstance::heine_system(g, RingElement(g, 2, 1), RingElement(g, 1), 1, poly(g, {qg}),
                                            {FieldElement(RingElement(g, 0, 1))}));
  const Field e = Field::quadratic(-3);
  out.push_back(HeineInstance::heine_system(e, RingElement(e, 3), RingElement(e, 1, 1), 1,
                                            poly(e, {FieldElement(e, 1), FieldElement(RingElement(e, 0, 1))}),
                                            {FieldElement(e, 1), FieldElement(RingElement(e, 1, -1))}));
  return out;
}

bool within(const ComplexBox& box, double re, double im, double tol) {
  return std::abs(box.re().mid() - re) < tol && std::abs(box.im().mid() - im) < tol;
}

Interval width_bound(unsigned bits) { return Interval::from_rational(Rational(Integer(1), Integer(1) << bits), 64); }

}  // namespace

TEST(Qdiff, TschakaloffCoefficients) {
  SeriesPrefix p = series_coefficients(tschakaloff(2), 0, 5);
  EXPECT_EQ(p.f[0], rat(1));
  EXPECT_EQ(p.f[1], rat(1, 4));
  EXPECT_EQ(p.f[2], rat(1, 32));
  EXPECT_EQ(p.F[0], rat(2));
  EXPECT_EQ(p.F[1], rat(2));
  EXPECT_EQ(p.F[2], rat(2));
  // f_nu = alpha^nu / q^{(nu+1)(nu+2)/2 - 1}
  for (long nu = 0; nu <= 5; ++nu) EXPECT_EQ(p.f[nu], rat(1).pow(nu) / rat(2).pow((nu + 1) * (nu + 2) / 2 - 1));
}

TEST(Qdiff, QExponentialCoefficients) {
  SeriesPrefix p = series_coefficients(qexp(3), 0, 3);
  EXPECT_EQ(p.f[0], rat(1));
  EXPECT_EQ(p.f[1], rat(1, 9));
  EXPECT_EQ(p.f[2], rat(4, 243));
}

TEST(Qdiff, ResidualVanishesThroughDegree64) {
  for (auto inst : {tschakaloff(2), qexp(3)}) {
    SeriesPrefix p = series_coefficients(inst, 0, 64);
    for (const auto& r : equation_residual(inst, p, 64)) ASSERT_TRUE(r.is_zero());
  }
}

TEST(Qdiff, PrefixInvariantsOnRandomInstances) {
  for (const Field& f : heine::testing::sample_fields()) {
    Gen g(0x0d1ffu + static_cast<std::uint64_t>(-f.discriminant_seed()));
    int built = 0;
    for (int trial = 0; trial < 40 && built < 6; ++trial) {
      const auto s = static_cast<unsigned>(g.range(1, 3));
      FieldElement q = g.nonzero_field(f, 6);
      if (abs_squared(q) <= 1) continue;
      Poly P = g.poly(f, static_cast<std::size_t>(g.range(0, s)), 6);
      Poly Q = g.poly(f, static_cast<std::size_t>(g.range(0, 3)), 6);
      std::vector<FieldElement> alphas = {g.nonzero_field(f, 6)};
      if (P.is_zero() || Q.is_zero() || P.coeff(0).is_zero()) continue;
      try {
        RingElement a = (q * FieldElement(f, q.den())).as_integral();
        HeineInstance inst(f, a, RingElement(f, q.den()), s, P, {Q}, alphas, g.nonzero_field(f, 4));
        SeriesPrefix p = series_coefficients(inst, 0, 24);
        ++built;
        EXPECT_EQ(p.f[0], -Q.coeff(0) / P.coeff(0));
        for (const auto& r : equation_residual(inst, p, 24)) ASSERT_TRUE(r.is_zero());
        for (std::size_t nu = 0; nu < p.f.size(); ++nu) {
          const auto n = static_cast<long>(nu);
          ASSERT_EQ(p.F[nu], P.coeff(0).pow(n + 1) * q.pow(n * (n + 1) / 2) * p.f[nu]);
          Rational bound = 1;
          for (std::size_t k = 0; k <= nu; ++k) bound *= p.C1 * p.C1;
          ASSERT_LE(abs_squared(p.f[nu]), bound);
        }
        // Extending in place agrees with a fresh computation.
        SeriesPrefix shortp = series_coefficients(inst, 0, 5);
        extend_series(inst, shortp, 24);
        ASSERT_EQ(shortp.f, p.f);
        ASSERT_EQ(shortp.F, p.F);
      } catch (const ValidationError&) {
        // Random data can violate a hypothesis; skip it.
      }
    }
    EXPECT_GE(built, 3) << f.to_string();
  }
}

TEST(Qdiff, PhiExamples) {
  ComplexBox t = eval_phi(tschakaloff(2), rat(1), 60);
  EXPECT_TRUE(within(t, 1.64163256065515, 0, 1e-13));
  ComplexBox e = eval_phi(qexp(2), rat(1), 60);
  EXPECT_TRUE(within(e, 2.38423103, 0, 1e-8));
  ComplexBox zero = eval_phi(qexp(2), rat(0), 60);
  EXPECT_TRUE(zero.re().contains(Rational(1)));
  EXPECT_EQ(zero.re().lower_rational(), 1);
  EXPECT_EQ(zero.re().upper_rational(), 1);
}

TEST(Qdiff, PhiAgainstIndependentPartialSums) {
  // T_2(1): partial sum to n = 9 plus the tail sum_{n>=10} 2^{-n(n+1)/2} < 2^{-54}.
  Rational partial = 0;
  for (long n = 0; n <= 9; ++n) partial += Rational(Integer(1), Integer(1) << (n * (n + 1) / 2));
  ComplexBox t = eval_phi(tschakaloff(2), rat(1), 120);
  Interval oracle = Interval::from_endpoints(partial, partial + Rational(Integer(1), Integer(1) << 54), 128);
  EXPECT_TRUE(t.re().overlaps(oracle));
  EXPECT_TRUE(oracle.contains(t.re()));

  // E_2(1): partial sum to n = 7; the tail is below twice the next term.
  Rational e = 0, denom = 1;
  for (long n = 0; n <= 7; ++n) {
    if (n > 0) denom *= (Integer(1) << n) - 1;
    e += Rational(1) / denom;
  }
  denom *= (Integer(1) << 8) - 1;
  ComplexBox box = eval_phi(qexp(2), rat(1), 120);
  EXPECT_TRUE(Interval::from_endpoints(e, e + Rational(2) / denom, 128).contains(box.re()));
}

TEST(Qdiff, PhiRelativeWidth) {
  for (unsigned bits : {30u, 100u, 400u}) {
    ComplexBox t = eval_phi(tschakaloff(2), rat(3, 2), bits);
    Interval w = t.re().width() / t.re().abs();
    EXPECT_TRUE(w.certainly_less(width_bound(bits - 1))) << bits;
  }
}

TEST(Qdiff, FAtQEqualsPhiAtAlpha) {
  int checked = 0;
  for (const auto& inst : heine_family()) {
    ASSERT_TRUE(inst.is_heine_system());
    for (std::size_t i = 0; i < inst.m(); ++i) {
      ComplexBox f = eval_f(inst, i, inst.q(), 100);
      ComplexBox phi = eval_phi(inst, inst.alpha_i(i), 100);
      EXPECT_TRUE(f.overlaps(phi)) << inst.to_config();
      Interval scale = phi.modulus();
      EXPECT_TRUE((f.re().width() / scale).certainly_less(width_bound(99)));
      ++checked;
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(Qdiff, FAtZeroIsF0) {
  auto inst = qexp(3);
  ComplexBox b = eval_f(inst, 0, rat(0), 80);
  EXPECT_TRUE(b.re().contains(Rational(1)));
  ComplexBox c = eval_f_continuation(inst, 0, rat(0), 80);
  EXPECT_TRUE(c.re().contains(Rational(1)));
}

TEST(Qdiff, SeriesAndContinuationAgree) {
  auto inst = tschakaloff(2);
  SeriesPrefix p = series_coefficients(inst, 0, 4);
  ComplexBox series;
  ASSERT_TRUE(eval_f_series(inst, p, rat(1, 2), 120, series));
  ComplexBox cont = eval_f_continuation(inst, 0, rat(1, 2), 120);
  EXPECT_TRUE(series.overlaps(cont));

  // Same check at a complex point of a Gaussian instance.
  auto fam = heine_family();
  const auto& g = fam[5];
  FieldElement z(RingElement(g.field(), 1, 1), Integer(3));
  SeriesPrefix pg = series_coefficients(g, 0, 4);
  ComplexBox s2;
  ASSERT_TRUE(eval_f_series(g, pg, z, 90, s2));
  EXPECT_TRUE(s2.overlaps(eval_f_continuation(g, 0, z, 90)));
}

TEST(Qdiff, ContinuationReportsPoles) {
  // P = 3 - z vanishes at z q^-1 = 3 for z = 9.
  auto inst = HeineInstance(kQ, RingElement(kQ, 3), RingElement(kQ, 1), 1, poly(kQ, {rat(3), rat(-1)}),
                            {poly(kQ, {rat(1)})}, {rat(1)}, rat(3));
  EXPECT_THROW(eval_f_continuation(inst, 0, rat(9), 60), ValidationError);
}

TEST(Qdiff, DownshiftSmallK) {
  auto inst = qexp(3, {rat(2)});
  auto [X0, Y0] = downshift(inst, 0, 0, rat(5));
  EXPECT_EQ(X0, rat(1));
  EXPECT_TRUE(Y0.is_zero());
  // k = 1: X = q^{s+u} P(z/q), Y = q^{s+u} Q(z/q); here s = u = 1.
  FieldElement z = rat(7, 2);
  auto [X1, Y1] = downshift(inst, 0, 1, z);
  FieldElement q = inst.q();
  EXPECT_EQ(X1, q.pow(2) * inst.P().eval(z / q));
  EXPECT_EQ(Y1, q.pow(2) * inst.Q(0).eval(z / q));
}

TEST(Qdiff, DownshiftIsSeriesIdentity) {
  for (const auto& inst : heine_family()) {
    const long M = 30;
    for (std::size_t i = 0; i < inst.m(); ++i) {
      SeriesPrefix p = series_coefficients(inst, i, M);
      Poly f(inst.field(), p.f);
      for (unsigned k = 0; k <= 10; ++k) {
        Downshift d = downshift_poly(inst, i, k);
        FieldElement q_k = inst.q().pow(-static_cast<long>(k));
        Poly lhs = Poly::monomial(inst.alpha_i(i).pow(k) * inst.q().pow(static_cast<long>(inst.u() * k)),
                                  inst.s() * k)
                       .mul_trunc(f.shift_scale(q_k), M);
        Poly rhs = d.X.mul_trunc(f, M) + d.Y.truncate(M);
        ASSERT_EQ(lhs, rhs) << "k=" << k;
        FieldElement z(inst.field(), Rational(3, 7));
        auto [X, Y] = downshift(inst, i, k, z);
        ASSERT_EQ(X, d.X.eval(z));
        ASSERT_EQ(Y, d.Y.eval(z));
      }
    }
  }
}

TEST(Qdiff, DownshiftIdentityNumerically) {
  auto inst = tschakaloff(2, {rat(3)});
  FieldElement z = rat(5, 3);
  for (unsigned k : {1u, 3u, 6u}) {
    auto [X, Y] = downshift(inst, 0, k, z);
    FieldElement lhs_scale = (rat(3) * z).pow(k) * inst.q().pow(static_cast<long>(inst.u() * k));
    ComplexBox lhs = to_box(lhs_scale, 200) * eval_f(inst, 0, z * inst.q().pow(-static_cast<long>(k)), 150);
    ComplexBox rhs = to_box(X, 200) * eval_f(inst, 0, z, 150) + to_box(Y, 200);
    EXPECT_TRUE(lhs.overlaps(rhs)) << k;
  }
}

TEST(Qdiff, DownshiftGrowthBound) {
  auto fam = heine_family();
  Gen g(31337);
  for (const auto& inst : fam) {
    DownshiftBound b = downshift_bound(inst);
    for (int n = 0; n < 10; ++n) {
      FieldElement z = g.field(inst.field(), 8);
      Interval az = z.is_zero() ? Interval::from_integer(0, 64) : modulus_interval(z, 64);
      Interval mx = az.lower() > 1 ? az : Interval::from_integer(1, 64);
      for (unsigned k = 1; k <= 6; ++k) {
        auto [X, Y] = downshift(inst, 0, k, z);
        if (X.is_zero()) continue;
        Interval bound = b.C2.pow(k) * modulus_interval(inst.q(), 64).pow(inst.s() * k * (k + 1) / 2) *
                         mx.pow(b.C3 * k);
        ASSERT_FALSE(bound.certainly_less(modulus_interval(X, 64)));
      }
    }
  }
}

TEST(Qdiff, ValidationRejectsBadInstances) {
  auto mk = [](long qa, long qb, unsigned s, Poly P, std::vector<FieldElement> al, FieldElement alpha) {
    std::vector<Poly> Q(al.size(), -P);
    return HeineInstance(kQ, RingElement(kQ, qa), RingElement(kQ, qb), s, P, Q, al, alpha);
  };
  EXPECT_THROW(mk(1, 1, 1, poly(kQ, {rat(1)}), {rat(1)}, rat(1)), ValidationError);   // |q| = 1
  EXPECT_THROW(mk(2, 3, 1, poly(kQ, {rat(1)}), {rat(1)}, rat(1)), ValidationError);   // |q| < 1
  EXPECT_THROW(mk(2, 1, 1, poly(kQ, {rat(0), rat(1)}), {rat(1)}, rat(1)), ValidationError);  // P(0) = 0
  EXPECT_THROW(mk(2, 1, 1, poly(kQ, {rat(1), rat(1), rat(1)}), {rat(1)}, rat(1)), ValidationError);  // deg P > s
  EXPECT_THROW(mk(2, 1, 1, poly(kQ, {rat(1)}), {rat(1), rat(4)}, rat(1)), ValidationError);  // 4 = 1 * q^2
  EXPECT_THROW(mk(2, 1, 1, poly(kQ, {rat(1)}), {rat(1), rat(1, 8)}, rat(1)), ValidationError);
  EXPECT_THROW(mk(2, 1, 1, poly(kQ, {rat(1), rat(-4)}), {rat(1)}, rat(1)), ValidationError);  // P(1/4) = 0
  EXPECT_THROW(mk(3, 1, 1, poly(kQ, {rat(3), rat(-1)}), {rat(1)}, rat(9)), ValidationError);  // P(9/3) = 0
  EXPECT_NO_THROW(mk(2, 1, 1, poly(kQ, {rat(1)}), {rat(1), rat(3)}, rat(1)));
}

TEST(Qdiff, NonPolynomialSolutions) {
  // deg P = s = 1 with alpha_1 = P_1 q^n makes the solution a polynomial.
  auto inst = HeineInstance::heine_system(kQ, RingElement(kQ, 2), RingElement(kQ, 1), 1,
                                          poly(kQ, {rat(1), rat(1)}), {rat(4)});
  EXPECT_FALSE(inst.solutions_non_polynomial());
  EXPECT_TRUE(qexp(3).solutions_non_polynomial());
}

TEST(Qdiff, ConfigRoundTripAndErrors) {
  const std::string text =
      "# m = 2 instance over Q(i)\n"
      "field.d = -1\n"
      "q.a = 2+w\n"
      "q.b = 1\n"
      "s = 1\n"
      "P = 3, -1\n"
      "Q1 = 1\n"
      "alpha_1 = 1\n"
      "alpha_2 = w   # Q2 defaults to -P\n";
  HeineInstance inst = HeineInstance::parse_config(text);
  EXPECT_EQ(inst.m(), 2u);
  EXPECT_EQ(inst.Q(1), -inst.P());
  EXPECT_EQ(inst.alpha(), inst.q());
  HeineInstance again = HeineInstance::parse_config(inst.to_config());
  EXPECT_EQ(again.to_config(), inst.to_config());

  try {
    HeineInstance::parse_config("q.a = 2\ns = 1\nP = 1\nalpha_1 = 1\nbogus = 3\n", "cfg");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:5"), std::string::npos) << e.what();
  }
  try {
    HeineInstance::parse_config("q.a = 2\ns = x\nP = 1\nalpha_1 = 1\n", "cfg");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(HeineInstance::parse_config("q.a = 2\ns = 1\nP = 1\n"), ValidationError);  // no alpha_i
}
