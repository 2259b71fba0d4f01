#pragma once

// Desk-scale check of the measure: enumerate integral linear forms
//
//     L = l_0 + l_1 theta_1 + ... + l_m theta_m,   theta_i = f_i(alpha)
//
// (theta_i = phi(alpha_i) for Heine systems with alpha = q) over a box, keep
// the smallest |L| per dyadic height shell, fit the observed exponent, and run
// the G/R decomposition p_j L = G_j + R_j on the shell minima.
//
// H = prod_{i>=1} max(1, |l_i|).

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "heine/chain.hpp"
#include "heine/expo.hpp"

namespace heine {

// Elements of Z_K with |x| <= cap in canonical order (|x|^2, then (x, y)).
std::vector<RingElement> ring_ball(const Field& field, unsigned long cap);

// Canonical order on vectors: sum |l_i|^2, then lexicographic on coordinates.
bool canonical_less(const std::vector<RingElement>& a, const std::vector<RingElement>& b);

struct HarnessOptions {
  std::vector<unsigned long> box;  // caps for l_0..l_m; one entry applies to all
  unsigned bits = 256;
  unsigned max_bits = 1u << 14;    // escalation cap
  std::optional<double> epsilon;   // default_epsilon when unset
  std::optional<Rational> rho;     // default_rho when unset
  unsigned N_floor = 8;            // smallest chain N used for G/R
  unsigned chain_bits = 128;       // target relative bits of r in the chain
  bool gr = true;
  bool keep_records = false;
  std::size_t min_shells = 10;
};

struct FormRecord {
  std::vector<RingElement> l;
  Integer H2;            // H^2, exact
  double log_H = 0;      // natural log
  Interval L;            // enclosure of |L|
  unsigned bits = 0;     // precision that resolved it
  bool resolved = false;  // enclosure excludes 0
  double log_L_lo() const;
  double log_L_hi() const;
};

// Strict weak order for shell minima: smaller lower endpoint of |L|, then
// canonical order of l.
bool record_less(const FormRecord& a, const FormRecord& b);

struct GrResult {
  BlockSizes lemma;               // sizes solved from the heights alone
  std::vector<unsigned> n;        // block sizes actually used
  bool N_floored = false;         // n scaled up to N_floor
  long k = 0;
  std::size_t j = 0;              // row used for the verdict
  std::vector<RingElement> G;     // G_j, all rows
  std::vector<Interval> R_abs;    // |R_j| enclosures, all rows
  double log_p = 0;               // natural log |p_j|
  bool G_nonzero = false;         // G_j != 0 for the chosen row
  bool R_small = false;           // |R_j| < 1/2 certified
  bool regime = false;            // both of the above for some j
  double log_bound = 0;           // log (2|p_j|)^{-1}
  bool bound_holds = false;       // |L| > (2|p_j|)^{-1} certified
};

struct Shell {
  unsigned index = 0;  // floor(log2 H^2): two shells per octave of H
  std::size_t count = 0;
  // The l_0 range covers |sum l_i theta_i| + 1 for every l in the shell, so
  // the minimum is not cut off by the box.
  bool complete = false;
  FormRecord min;
  std::optional<GrResult> gr;
};

struct ExponentFit {
  double nu_hat = 0;  // -slope of log min|L| against log H
  double stderr_slope = 0;
  double band_lo = 0, band_hi = 0;  // nu_hat -+ 2 stderr
  std::size_t points = 0;
};

struct MeasureReport {
  std::string instance;  // config text
  std::vector<unsigned long> box;
  unsigned bits = 0;
  std::size_t forms = 0;
  std::size_t unresolved = 0;
  unsigned max_bits_used = 0;
  std::vector<Shell> shells;        // increasing index, non-empty only
  std::vector<FormRecord> records;  // canonical order; only with keep_records
  double log_min_LH = 0;            // min over records of log(|L|_lo H^{mu+eps})

  double gamma = 0;
  bool admissible = false;
  double mu = 0;  // NaN when inadmissible
  double epsilon = 0;
  Rational rho;
  Exponents exponents;
  EffectiveConstants constants;
  std::optional<Thresholds> thresholds;
  std::optional<ExponentFit> fit;
  std::string fit_error;

  // Flags.
  bool all_resolved = false;
  bool nu_within = false;  // nu_hat <= mu + epsilon
  bool gr_checked = false;
  bool gr_all_hold = false;  // bound holds wherever the regime holds
  std::size_t gr_regime_count = 0;
  bool above_H0 = false;  // some shell minimum has H > H_0
};

// Enclosures of theta_1..theta_m at `bits`.
std::vector<ComplexBox> theta_values(const HeineInstance& inst, unsigned bits);

// Enumeration only (no fit, no G/R): every non-zero vector in the box,
// escalating precision until |L| excludes 0 or max_bits is reached. The
// parallel and serial versions produce identical reports.
MeasureReport enumerate_forms(const HeineInstance& inst, const HarnessOptions& opts);
MeasureReport enumerate_forms_serial(const HeineInstance& inst, const HarnessOptions& opts);

// Least squares of log |L| on log H. Throws ValidationError with fewer than
// min_points points.
ExponentFit fit_exponent(const std::vector<double>& log_H, const std::vector<double>& log_L,
                         std::size_t min_points = 10);
// Over the resolved minima of complete shells.
ExponentFit fit_exponent(const MeasureReport& report, std::size_t min_points = 10);

// p_j L = G_j + R_j with G_j = l_0 p_j + sum l_i q_ji exact and R_j = sum l_i r_ji.
// L is the direct enclosure of |L|. Throws InconsistencyError if every G_j vanishes.
GrResult gr_decompose(const ChainResult& chain, const std::vector<RingElement>& l, const Interval& L);

// Stand-ins for C12, C13, C14 from chain runs built with the given exponents.
EffectiveConstants effective_constants(const Exponents& e, double log_a, const std::vector<const ChainResult*>& runs);

// Block sizes for a chain at these heights: the solved sizes scaled so that
// N >= N_floor, each n_i > delta N.
std::vector<unsigned> chain_blocks(const BlockSizes& lemma, unsigned N_floor, const Rational& delta);

// Full pipeline: enumeration, exponent fit, G/R on every shell minimum when
// the exponents are admissible, thresholds and flags.
MeasureReport measure(const HeineInstance& inst, const HarnessOptions& opts);

nlohmann::json to_json(const MeasureReport& report);
std::string shells_csv(const MeasureReport& report);

// "200" or "200,50,50".
std::vector<unsigned long> parse_box(const std::string& text);

}  // namespace heine
