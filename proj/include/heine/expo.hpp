#pragma once

// Exponent calculus of the measure: gamma_1..gamma_5 in (delta_0, rho_0) form,
// the delta_0 = 1/2 specialization rho_0(m,s,gamma), mu(m,s,gamma), the
// admissibility threshold Gamma(m,s), the constants of the axiomatic
// (Matala-aho) variant, and the block sizes of the G/R argument.
//
// gamma = log|b| / log|a| for q = a/b.

#include <string>
#include <vector>

#include "heine/interval.hpp"
#include "heine/ring.hpp"

namespace heine {

class HeineInstance;

// gamma_1 = (2-d0)^2 (1-d0) / (2 d0)
// gamma_2 = gamma_1 + r0 + d0 + (1 + s (r0+d0)^2) / 2
// gamma_3 = gamma_1 + 1/2 + d0 r0 / m
// gamma_4 = gamma_3 + gamma (r0+d0) (1 - d0/m + s (r0+d0)/2)
// gamma_5 = r0 - gamma (r0+d0)
template <typename T>
struct GammaSet {
  T g1, g2, g3, g4, g5;
};

struct ExponentParams {
  unsigned m = 1, s = 1;
  Rational gamma, delta0, rho0;
  GammaSet<Rational> g;
  bool bound_rho = false;    // rho_0 > m (gamma_1 + 1/2) / (1 - delta_0)
  bool bound_gamma = false;  // gamma < (rho_0 - m gamma_3) / ((rho_0+d0)(1 + sm(rho_0+d0)/2 + m - d0))
  bool admissible = false;   // gamma_5 - m gamma_4 > 0
};

// Exact. Throws ValidationError unless 0 < delta0 < 1, rho0 > 0, 0 <= gamma < 1.
ExponentParams gammas(unsigned m, unsigned s, const Rational& gamma, const Rational& delta0, const Rational& rho0);
// Same formulas over intervals (gamma need not be rational).
GammaSet<Interval> gammas(unsigned m, unsigned s, const Interval& gamma, const Interval& delta0, const Interval& rho0);

// Precision of all enclosures below.
constexpr mpfr_prec_t kExpoPrecision = 160;

Interval exact_interval(const Rational& v);

// rho_0(m,s,gamma) = c + sqrt(c^2 + d), c = 13m/4 + gamma/(2(1-gamma)),
// d = (13m(s+2)+s+17)/(4s) + (s+2) gamma/(2s(1-gamma)).
// Throws ValidationError unless 0 <= gamma < 1 (certainly).
Interval rho0(unsigned m, unsigned s, const Interval& gamma);
// |rho^2 - 2c rho - d| at the enclosure (upper bound).
double rho0_residual(unsigned m, unsigned s, const Interval& gamma);
// |N'(rho) D(rho) - N(rho) D'(rho)| at rho_0 for mu = N/D (upper bound).
double rho0_stationarity(unsigned m, unsigned s, const Interval& gamma);

struct MuResult {
  Interval rho0;
  Interval mu;        // closed form
  Interval mu_ratio;  // gamma_2 / (gamma_5 - m gamma_4) at delta_0 = 1/2
  Interval denominator;
  bool forms_agree = false;  // |mu - mu_ratio| <= 1e-9 certified
};
// Throws ValidationError if the denominator is not certainly positive.
MuResult mu(unsigned m, unsigned s, const Interval& gamma);

// f(tau) = (4 rho_0 - 13m) / (4ms rho_0^2 + 4(2m+ms+1) rho_0 + 4m+ms+2) - tau.
Interval f_tau(unsigned m, unsigned s, const Interval& tau);

struct GammaThreshold {
  unsigned m = 1, s = 1;
  std::size_t grid = 0;       // scan points tau = k / grid, k = 0..grid-1
  std::size_t bracket = 0;    // first k with f(k/grid) < 0
  Rational lo, hi;            // f(lo) > 0 > f(hi), hi - lo <= width
  Interval f_lo, f_hi, f_zero;
  unsigned bisection_steps = 0;
  double width = 0;
  Interval enclosure() const;
};

// Scan then bisection. Throws InconsistencyError if no sign change is found
// or the signs cannot be certified.
GammaThreshold gamma_threshold(unsigned m, unsigned s, std::size_t grid = 10000, double width = 1e-12);
GammaThreshold gamma_threshold_serial(unsigned m, unsigned s, std::size_t grid = 10000, double width = 1e-12);

// Signs of f on a grid; parallel and serial versions must agree exactly.
// +1, -1, or 0 if the sign is not certified.
std::vector<int> f_sign_scan(unsigned m, unsigned s, std::size_t grid);
std::vector<int> f_sign_scan_serial(unsigned m, unsigned s, std::size_t grid);

struct ExponentRow {
  unsigned m = 1, s = 1;
  double gamma = 0;
  double rho0 = 0;
  double mu = 0;  // NaN when inadmissible
  double Gamma = 0;
  bool admissible = false;
};
ExponentRow exponent_row(unsigned m, unsigned s, const Interval& gamma, const GammaThreshold& threshold);
std::string csv_header();
std::string to_csv(const ExponentRow& row);

// Double-precision view of an exponent set, for the empirical constants.
struct Exponents {
  unsigned m = 1, s = 1;
  double gamma = 0, delta0 = 0, rho0 = 0;
  double g1 = 0, g2 = 0, g3 = 0, g4 = 0, g5 = 0;
  double margin() const { return g5 - m * g4; }  // gamma_5 - m gamma_4
};
Exponents exponents(unsigned m, unsigned s, const Interval& gamma, const Rational& delta0, const Rational& rho0);

// Stand-ins for the existential constants: |p| <= C12^N |a|^{gamma_2 N^2},
// |r| <= C13^N |a|^{gamma_4 N^2 - gamma_5 N n_i} for N >= C14, measured.
struct EffectiveConstants {
  double log_C12 = 0;  // natural log
  double log_C13 = 0;
  double C14 = 1;
};

struct MatalaAho {
  double g6 = 0, g7 = 0, g8 = 0, g9 = 0, g10 = 0;
  double A = 0, B = 0, F1_log = 0, F2_log = 0;  // F1, F2 as natural logs
  double epsilon(double log_H) const;       // A / sqrt(log H)
};
// Throws ValidationError unless gamma_8 - m gamma_9 > 0.
MatalaAho matala_aho(const Exponents& e, double log_a, const EffectiveConstants& c);

struct Thresholds {
  double S0 = 0;
  int dominant = 0;  // index 0..5 of the maximal term
  double log_H0 = 0;  // natural log of H_0
  double terms[6] = {0, 0, 0, 0, 0, 0};
};
// Throws ValidationError unless 0 < eps < (gamma_5 - m gamma_4)/(2m).
Thresholds thresholds(const Exponents& e, double log_a, double eps, const EffectiveConstants& c);

struct BlockSizes {
  double S = 0;
  std::vector<double> s_i;
  std::vector<unsigned> n;
  unsigned N = 0;
  bool above_H0 = false;        // H > H_0
  bool n_exceeds_delta = false;  // n_i > delta N for all i
  bool N_in_range = false;       // S_0 < S - m < N <= S
};
// log_H: natural logs of the heights H_i. Throws ValidationError on eps.
BlockSizes block_sizes(const Exponents& e, double log_a, const std::vector<double>& log_H, double eps,
                       const Thresholds& th);

// gamma = log|b| / log|a| of an instance.
Interval gamma_of(const HeineInstance& inst);

// rho = m delta + rho_0 with rho_0 = rho_0(m,s,gamma) rounded up to a multiple
// of 1/64 when m delta = 1/2, else m(gamma_1 + 1/2)/(1 - m delta) + 1.
Rational default_rho(unsigned m, unsigned s, const Rational& delta, const Interval& gamma);

// Default harness epsilon: min(1/2, (gamma_5 - m gamma_4) / (4m)); 0 if inadmissible.
double default_epsilon(const Exponents& e);

}  // namespace heine
