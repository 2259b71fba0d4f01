#include "heine/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

#include "heine/errors.hpp"
#include "heine/parallel.hpp"

namespace heine {

namespace {

constexpr std::size_t kChunk = 2048;
constexpr std::size_t kMaxForms = std::size_t{1} << 32;

double log_mpfr(mpfr_srcptr v) {
  if (mpfr_zero_p(v)) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double d = mpfr_get_d_2exp(&e, v, MPFR_RNDN);
  return std::log(std::fabs(d)) + static_cast<double>(e) * std::log(2.0);
}

double log_integer(const Integer& v) {
  long e = 0;
  const double d = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::log(std::fabs(d)) + static_cast<double>(e) * std::log(2.0);
}

// Natural log of |x| for x in Z_K, x != 0.
double log_abs(const RingElement& x) { return 0.5 * log_integer(x.norm()); }

Integer height_squared(const std::vector<RingElement>& l) {
  Integer h = 1;
  for (std::size_t i = 1; i < l.size(); ++i) {
    Integer n = l[i].norm();
    if (n > 1) h *= n;
  }
  return h;
}

class ThetaCache {
 public:
  explicit ThetaCache(const HeineInstance& inst) : inst_(inst) {}

  const std::vector<ComplexBox>& at(unsigned bits) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(bits);
    if (it == cache_.end()) it = cache_.emplace(bits, theta_values(inst_, bits)).first;
    return it->second;
  }

 private:
  const HeineInstance& inst_;
  std::mutex mu_;
  std::map<unsigned, std::vector<ComplexBox>> cache_;
};

FormRecord evaluate(const std::vector<RingElement>& l, ThetaCache& cache, const HarnessOptions& opts) {
  FormRecord r;
  r.l = l;
  r.H2 = height_squared(l);
  r.log_H = 0.5 * log_integer(r.H2);
  for (unsigned bits = opts.bits;; bits *= 2) {
    const auto& th = cache.at(bits);
    ComplexBox L = to_box(l[0], bits);
    for (std::size_t i = 1; i < l.size(); ++i) {
      if (!l[i].is_zero()) L += to_box(l[i], bits) * th[i - 1];
    }
    r.L = L.modulus();
    r.bits = bits;
    r.resolved = r.L.positive();
    if (r.resolved || bits * 2 > opts.max_bits) break;
  }
  return r;
}

struct Partial {
  std::map<unsigned, Shell> shells;
  std::size_t forms = 0, unresolved = 0;
  unsigned max_bits = 0;
  double log_min_LH = std::numeric_limits<double>::infinity();
  std::vector<FormRecord> records;
};

void absorb(Partial& into, Partial&& from) {
  for (auto& [idx, sh] : from.shells) {
    auto it = into.shells.find(idx);
    if (it == into.shells.end()) {
      into.shells.emplace(idx, std::move(sh));
    } else {
      it->second.count += sh.count;
      if (record_less(sh.min, it->second.min)) it->second.min = std::move(sh.min);
    }
  }
  into.forms += from.forms;
  into.unresolved += from.unresolved;
  into.max_bits = std::max(into.max_bits, from.max_bits);
  into.log_min_LH = std::min(into.log_min_LH, from.log_min_LH);
  for (auto& r : from.records) into.records.push_back(std::move(r));
}

struct Setup {
  std::vector<std::vector<RingElement>> lists;
  std::size_t total = 1;
  double exponent = std::numeric_limits<double>::quiet_NaN();  // mu + epsilon
};

void process_range(const Setup& st, std::size_t begin, std::size_t end, ThetaCache& cache,
                   const HarnessOptions& opts, Partial& out) {
  const std::size_t dims = st.lists.size();
  std::vector<RingElement> l(dims);
  for (std::size_t idx = begin; idx < end; ++idx) {
    std::size_t rest = idx;
    bool zero = true;
    for (std::size_t c = 0; c < dims; ++c) {
      const auto& list = st.lists[c];
      l[c] = list[rest % list.size()];
      rest /= list.size();
      zero = zero && l[c].is_zero();
    }
    if (zero) continue;
    FormRecord rec = evaluate(l, cache, opts);
    ++out.forms;
    if (!rec.resolved) ++out.unresolved;
    out.max_bits = std::max(out.max_bits, rec.bits);
    if (rec.resolved && !std::isnan(st.exponent)) {
      out.log_min_LH = std::min(out.log_min_LH, rec.log_L_lo() + st.exponent * rec.log_H);
    }
    const unsigned shell = static_cast<unsigned>(mpz_sizeinbase(rec.H2.get_mpz_t(), 2) - 1);
    auto it = out.shells.find(shell);
    if (it == out.shells.end()) {
      Shell sh;
      sh.index = shell;
      sh.count = 1;
      sh.min = rec;
      out.shells.emplace(shell, std::move(sh));
    } else {
      ++it->second.count;
      if (record_less(rec, it->second.min)) it->second.min = rec;
    }
    if (opts.keep_records) out.records.push_back(std::move(rec));
  }
}

std::vector<unsigned long> normalized_box(const HeineInstance& inst, const std::vector<unsigned long>& box) {
  const std::size_t dims = inst.m() + 1;
  if (box.size() == 1) return std::vector<unsigned long>(dims, box[0]);
  if (box.size() != dims) {
    throw ValidationError("box needs 1 or " + std::to_string(dims) + " caps, got " + std::to_string(box.size()));
  }
  return box;
}

// Exponent data shared by enumeration and the full pipeline.
void setup_exponents(const HeineInstance& inst, const HarnessOptions& opts, MeasureReport& rep) {
  const unsigned m = static_cast<unsigned>(inst.m());
  const Interval gamma = gamma_of(inst);
  rep.gamma = gamma.mid();
  const Rational delta(1, 2 * static_cast<long>(m));
  rep.rho = opts.rho ? *opts.rho : default_rho(m, inst.s(), delta, gamma);
  rep.rho.canonicalize();
  if (!(rep.rho > Rational(1, 2))) throw ValidationError("rho must exceed m delta = 1/2");
  rep.exponents = exponents(m, inst.s(), gamma, Rational(1, 2), Rational(rep.rho - Rational(1, 2)));
  rep.mu = std::numeric_limits<double>::quiet_NaN();
  rep.admissible = false;
  try {
    MuResult mr = mu(m, inst.s(), gamma);
    rep.admissible = rep.exponents.margin() > 0;
    if (rep.admissible) rep.mu = mr.mu.mid();
  } catch (const ValidationError&) {
  }
  if (opts.epsilon) {
    const double eps = *opts.epsilon;
    if (rep.admissible && !(eps > 0 && eps < rep.exponents.margin() / (2 * m))) {
      throw ValidationError("epsilon must satisfy 0 < epsilon < (gamma_5 - m gamma_4) / (2m) = " +
                            std::to_string(rep.exponents.margin() / (2 * m)));
    }
    rep.epsilon = eps;
  } else {
    rep.epsilon = default_epsilon(rep.exponents);
  }
}

MeasureReport enumerate(const HeineInstance& inst, const HarnessOptions& opts, bool parallel) {
  if (opts.bits < 16 || opts.max_bits < opts.bits) throw ValidationError("need 16 <= bits <= max_bits");
  MeasureReport rep;
  rep.instance = inst.to_config();
  rep.box = normalized_box(inst, opts.box);
  rep.bits = opts.bits;
  setup_exponents(inst, opts, rep);

  Setup st;
  for (unsigned long cap : rep.box) {
    st.lists.push_back(ring_ball(inst.field(), cap));
    if (st.total > kMaxForms / st.lists.back().size()) throw ValidationError("box too large to enumerate");
    st.total *= st.lists.back().size();
  }
  if (st.total <= 1) throw ValidationError("box contains no non-zero vector");
  if (rep.admissible) st.exponent = rep.mu + rep.epsilon;

  ThetaCache cache(inst);
  cache.at(opts.bits);
  const std::size_t chunks = (st.total + kChunk - 1) / kChunk;
  Partial all;
  if (parallel) {
    std::vector<Partial> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      process_range(st, c * kChunk, std::min(st.total, (c + 1) * kChunk), cache, opts, parts[c]);
    });
    for (auto& p : parts) absorb(all, std::move(p));
  } else {
    for (std::size_t c = 0; c < chunks; ++c) {
      Partial p;
      process_range(st, c * kChunk, std::min(st.total, (c + 1) * kChunk), cache, opts, p);
      absorb(all, std::move(p));
    }
  }

  rep.forms = all.forms;
  rep.unresolved = all.unresolved;
  rep.max_bits_used = all.max_bits;
  rep.all_resolved = all.unresolved == 0;
  rep.log_min_LH = rep.admissible ? all.log_min_LH : std::numeric_limits<double>::quiet_NaN();
  // Every |l_i| is at most the shell's upper height 2^{(index+1)/2}.
  std::vector<double> theta_abs;
  for (const auto& t : cache.at(opts.bits)) theta_abs.push_back(t.modulus().upper());
  for (auto& [idx, sh] : all.shells) {
    const double h_max = std::pow(2.0, (idx + 1) / 2.0);
    double reach = 1;
    for (std::size_t i = 1; i < rep.box.size(); ++i) {
      reach += std::min(static_cast<double>(rep.box[i]), h_max) * theta_abs[i - 1];
    }
    sh.complete = reach <= static_cast<double>(rep.box[0]);
    rep.shells.push_back(std::move(sh));
  }
  rep.records = std::move(all.records);
  std::sort(rep.records.begin(), rep.records.end(),
            [](const FormRecord& a, const FormRecord& b) { return canonical_less(a.l, b.l); });
  return rep;
}

double log_abs_a(const HeineInstance& inst) { return log_abs(inst.a()); }

std::string join_l(const std::vector<RingElement>& l, char sep) {
  std::string out;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) out += sep;
    out += l[i].to_string();
  }
  return out;
}

}  // namespace

double FormRecord::log_L_lo() const { return log_mpfr(L.lo()); }
double FormRecord::log_L_hi() const { return log_mpfr(L.hi()); }

std::vector<RingElement> ring_ball(const Field& field, unsigned long cap) {
  std::vector<RingElement> out;
  const Integer cap2 = Integer(cap) * cap;
  if (field.is_rational()) {
    for (long x = -static_cast<long>(cap); x <= static_cast<long>(cap); ++x) out.emplace_back(field, x);
  } else {
    // |x + y w| <= cap forces |y| Im(w) <= cap with Im(w) >= sqrt(3)/2, and
    // then |x| <= cap + |y|.
    const long ymax = static_cast<long>(2 * cap), xmax = static_cast<long>(3 * cap + 1);
    for (long y = -ymax; y <= ymax; ++y) {
      for (long x = -xmax; x <= xmax; ++x) {
        RingElement e(field, x, y);
        if (e.norm() <= cap2) out.push_back(std::move(e));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const RingElement& a, const RingElement& b) {
    const Integer na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  });
  return out;
}

bool canonical_less(const std::vector<RingElement>& a, const std::vector<RingElement>& b) {
  Integer sa = 0, sb = 0;
  for (const auto& e : a) sa += e.norm();
  for (const auto& e : b) sb += e.norm();
  if (sa != sb) return sa < sb;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i].x() != b[i].x()) return a[i].x() < b[i].x();
    if (a[i].y() != b[i].y()) return a[i].y() < b[i].y();
  }
  return a.size() < b.size();
}

bool record_less(const FormRecord& a, const FormRecord& b) {
  const int c = mpfr_cmp(a.L.lo(), b.L.lo());
  if (c != 0) return c < 0;
  return canonical_less(a.l, b.l);
}

std::vector<ComplexBox> theta_values(const HeineInstance& inst, unsigned bits) {
  std::vector<ComplexBox> out(inst.m());
  for (std::size_t i = 0; i < inst.m(); ++i) out[i] = eval_f(inst, i, inst.alpha(), bits + 16);
  return out;
}

MeasureReport enumerate_forms(const HeineInstance& inst, const HarnessOptions& opts) {
  return enumerate(inst, opts, true);
}

MeasureReport enumerate_forms_serial(const HeineInstance& inst, const HarnessOptions& opts) {
  return enumerate(inst, opts, false);
}

ExponentFit fit_exponent(const std::vector<double>& log_H, const std::vector<double>& log_L, std::size_t min_points) {
  if (log_H.size() != log_L.size()) throw ValidationError("fit needs paired data");
  const std::size_t n = log_H.size();
  if (n < std::max<std::size_t>(min_points, 3)) {
    throw ValidationError("insufficient shells for a fit: " + std::to_string(n) + " < " +
                          std::to_string(std::max<std::size_t>(min_points, 3)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += log_H[i];
    my += log_L[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (log_H[i] - mx) * (log_H[i] - mx);
    sxy += (log_H[i] - mx) * (log_L[i] - my);
  }
  if (!(sxx > 0)) throw ValidationError("fit needs at least two distinct heights");
  const double slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = log_L[i] - (my + slope * (log_H[i] - mx));
    ss += res * res;
  }
  ExponentFit f;
  f.nu_hat = -slope;
  f.stderr_slope = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  f.band_lo = f.nu_hat - 2 * f.stderr_slope;
  f.band_hi = f.nu_hat + 2 * f.stderr_slope;
  f.points = n;
  return f;
}

ExponentFit fit_exponent(const MeasureReport& report, std::size_t min_points) {
  if (report.shells.empty()) throw ValidationError("empty report");
  std::vector<double> x, y;
  for (const auto& sh : report.shells) {
    if (!sh.min.resolved || !sh.complete) continue;
    x.push_back(sh.min.log_H);
    y.push_back(0.5 * (sh.min.log_L_lo() + sh.min.log_L_hi()));
  }
  return fit_exponent(x, y, min_points);
}

GrResult gr_decompose(const ChainResult& chain, const std::vector<RingElement>& l, const Interval& L) {
  const NumericForms& f = chain.forms;
  const std::size_t m = f.f_alpha.size();
  if (l.size() != m + 1) throw ValidationError("form length does not match the chain");
  GrResult g;
  g.k = f.k;
  const Interval half = Interval::from_rational(Rational(1, 2), 64);
  std::optional<std::size_t> first_nonzero, chosen;
  for (std::size_t j = 0; j <= m; ++j) {
    RingElement G = l[0] * f.p[j];
    ComplexBox R(f.r[j][0].precision());
    for (std::size_t i = 0; i < m; ++i) {
      G += l[i + 1] * f.q[j][i];
      if (!l[i + 1].is_zero()) R += to_box(l[i + 1], f.r[j][i].precision()) * f.r[j][i];
    }
    Interval Rabs = R.modulus();
    const bool small = Rabs.certainly_less(half);
    if (!G.is_zero()) {
      if (!first_nonzero) first_nonzero = j;
      if (small && !chosen) chosen = j;
    }
    g.G.push_back(std::move(G));
    g.R_abs.push_back(std::move(Rabs));
  }
  if (!first_nonzero) throw InconsistencyError("every G_j vanishes although Delta_k != 0");
  g.j = chosen ? *chosen : *first_nonzero;
  g.G_nonzero = true;
  g.R_small = g.R_abs[g.j].certainly_less(half);
  g.regime = g.R_small;
  g.log_p = log_abs(f.p[g.j]);
  g.log_bound = -std::log(2.0) - g.log_p;
  // |L| > 1/(2|p|)  <=>  4 |L|^2 |p|^2 > 1, with |L| at its lower end.
  const Rational lo = L.lower_rational();
  g.bound_holds = lo > 0 && Rational(lo * lo * 4 * f.p[g.j].norm()) > 1;
  return g;
}

EffectiveConstants effective_constants(const Exponents& e, double log_a, const std::vector<const ChainResult*>& runs) {
  EffectiveConstants c;
  if (runs.empty()) return c;
  c.log_C12 = c.log_C13 = -std::numeric_limits<double>::infinity();
  c.C14 = std::numeric_limits<double>::infinity();
  for (const ChainResult* run : runs) {
    const auto& fam = run->family;
    const double N = fam.N;
    Rational dN = fam.delta * fam.N;
    Integer dfloor;
    mpz_fdiv_q(dfloor.get_mpz_t(), dN.get_num_mpz_t(), dN.get_den_mpz_t());
    c.C14 = std::min(c.C14, N);
    for (std::size_t j = 0; j < run->forms.p.size(); ++j) {
      c.log_C12 = std::max(c.log_C12, (log_abs(run->forms.p[j]) - e.g2 * N * N * log_a) / N);
      for (std::size_t i = 0; i < fam.N_i.size(); ++i) {
        const double n_i = static_cast<double>(fam.N_i[i]) - N + dfloor.get_d();
        const double lr = log_mpfr(run->forms.r[j][i].modulus().hi());
        c.log_C13 = std::max(c.log_C13, (lr - (e.g4 * N * N - e.g5 * N * n_i) * log_a) / N);
      }
    }
  }
  return c;
}

std::vector<unsigned> chain_blocks(const BlockSizes& lemma, unsigned N_floor, const Rational& delta) {
  const std::size_t m = lemma.s_i.size();
  if (m == 0) throw ValidationError("no blocks");
  unsigned N = std::max<unsigned>({lemma.N, N_floor, static_cast<unsigned>(2 * m)});
  Rational dN = delta * N;
  Integer df;
  mpz_fdiv_q(df.get_mpz_t(), dN.get_num_mpz_t(), dN.get_den_mpz_t());
  const unsigned need = static_cast<unsigned>(df.get_ui()) + 1;
  auto valid = [&](const std::vector<unsigned>& n) {
    unsigned sum = 0;
    for (unsigned v : n) {
      if (v < need) return false;
      sum += v;
    }
    return sum == N;
  };
  if (lemma.N == N && valid(lemma.n)) return lemma.n;

  double total = 0;
  for (double v : lemma.s_i) total += std::max(0.0, v);
  std::vector<double> w(m, 1.0 / static_cast<double>(m));
  if (total > 0) {
    for (std::size_t i = 0; i < m; ++i) w[i] = std::max(0.0, lemma.s_i[i]) / total;
  }
  std::vector<unsigned> n(m);
  std::vector<std::pair<double, std::size_t>> rem;
  unsigned used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = w[i] * N;
    n[i] = static_cast<unsigned>(std::floor(exact));
    used += n[i];
    rem.emplace_back(exact - n[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < N; ++r, ++used) ++n[rem[r % m].second];
  for (std::size_t i = 0; i < m; ++i) {
    while (n[i] < need) {
      std::size_t big = (i == 0) ? 1 : 0;
      for (std::size_t t = 0; t < m; ++t) {
        if (t != i && n[t] > n[big]) big = t;
      }
      if (n[big] <= need) throw ValidationError("cannot distribute blocks with n_i > delta N");
      --n[big];
      ++n[i];
    }
  }
  return n;
}

MeasureReport measure(const HeineInstance& inst, const HarnessOptions& opts) {
  MeasureReport rep = enumerate_forms(inst, opts);
  try {
    rep.fit = fit_exponent(rep, opts.min_shells);
    rep.nu_within = rep.admissible && rep.fit->nu_hat <= rep.mu + rep.epsilon;
  } catch (const ValidationError& e) {
    rep.fit_error = e.what();
  }
  if (!rep.admissible || !opts.gr || !(rep.epsilon > 0)) return rep;

  const unsigned m = static_cast<unsigned>(inst.m());
  const Rational delta(1, 2 * static_cast<long>(m));
  const double log_a = log_abs_a(inst);
  const Exponents& e = rep.exponents;
  const Thresholds none;

  std::map<std::vector<unsigned>, std::unique_ptr<ChainResult>> chains;
  std::vector<std::vector<unsigned>> used(rep.shells.size());
  std::vector<std::vector<double>> heights(rep.shells.size());
  for (std::size_t s = 0; s < rep.shells.size(); ++s) {
    const auto& l = rep.shells[s].min.l;
    for (std::size_t i = 1; i < l.size(); ++i) heights[s].push_back(l[i].is_zero() ? 0.0 : std::max(0.0, log_abs(l[i])));
    BlockSizes lemma = block_sizes(e, log_a, heights[s], rep.epsilon, none);
    used[s] = chain_blocks(lemma, opts.N_floor, delta);
    auto& slot = chains[used[s]];
    if (!slot) {
      PadeTriple pt = build_pade(inst, BlockProfile(used[s], delta));
      slot = std::make_unique<ChainResult>(run_chain(inst, pt, rep.rho, opts.chain_bits));
    }
  }
  std::vector<const ChainResult*> runs;
  for (const auto& [k, v] : chains) runs.push_back(v.get());
  rep.constants = effective_constants(e, log_a, runs);
  rep.thresholds = thresholds(e, log_a, rep.epsilon, rep.constants);

  rep.gr_checked = true;
  rep.gr_all_hold = true;
  for (std::size_t s = 0; s < rep.shells.size(); ++s) {
    Shell& sh = rep.shells[s];
    if (!sh.min.resolved) continue;
    GrResult g = gr_decompose(*chains.at(used[s]), sh.min.l, sh.min.L);
    g.lemma = block_sizes(e, log_a, heights[s], rep.epsilon, *rep.thresholds);
    g.n = used[s];
    g.N_floored = g.n != g.lemma.n;
    rep.above_H0 = rep.above_H0 || g.lemma.above_H0;
    if (g.regime) {
      ++rep.gr_regime_count;
      rep.gr_all_hold = rep.gr_all_hold && g.bound_holds;
    }
    sh.gr = std::move(g);
  }
  return rep;
}

nlohmann::json to_json(const MeasureReport& r) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["instance"] = r.instance;
  j["box"] = r.box;
  j["bits"] = r.bits;
  j["forms"] = r.forms;
  j["unresolved"] = r.unresolved;
  j["max_bits_used"] = r.max_bits_used;
  json shells = json::array();
  for (const auto& sh : r.shells) {
    json s;
    s["index"] = sh.index;
    s["H_lo"] = std::pow(2.0, sh.index / 2.0);
    s["H"] = std::sqrt(sh.min.H2.get_d());
    s["complete"] = sh.complete;
    json l = json::array();
    for (const auto& e : sh.min.l) l.push_back(e.to_string());
    s["argmin"] = l;
    s["logL_lo"] = num(sh.min.log_L_lo());
    s["logL_hi"] = num(sh.min.log_L_hi());
    s["count"] = sh.count;
    s["bits"] = sh.min.bits;
    s["resolved"] = sh.min.resolved;
    if (sh.gr) {
      const GrResult& g = *sh.gr;
      json gj;
      gj["n_lemma"] = g.lemma.n;
      gj["S"] = g.lemma.S;
      gj["n"] = g.n;
      gj["N_floored"] = g.N_floored;
      gj["k"] = g.k;
      gj["j"] = g.j;
      json G = json::array(), R = json::array();
      for (const auto& x : g.G) G.push_back(x.to_string());
      for (const auto& x : g.R_abs) R.push_back(num(log_mpfr(x.hi())));
      gj["G"] = G;
      gj["log_R_hi"] = R;
      gj["log_p"] = g.log_p;
      gj["log_bound"] = g.log_bound;
      gj["regime"] = g.regime;
      gj["bound_holds"] = g.bound_holds;
      s["gr"] = gj;
    }
    shells.push_back(s);
  }
  j["shells"] = shells;
  if (r.fit) {
    j["nu_hat"] = r.fit->nu_hat;
    j["nu_band"] = {r.fit->band_lo, r.fit->band_hi};
  } else {
    j["nu_hat"] = nullptr;
    j["fit_error"] = r.fit_error;
  }
  j["mu"] = num(r.mu);
  j["epsilon"] = r.epsilon;
  j["empirical_C"] = num(std::exp(r.log_min_LH));
  j["log_empirical_C"] = num(r.log_min_LH);
  j["gamma"] = r.gamma;
  j["rho"] = r.rho.get_str();
  const Exponents& e = r.exponents;
  j["exponents"] = {{"m", e.m},         {"s", e.s},   {"delta0", e.delta0}, {"rho0", e.rho0}, {"gamma_1", e.g1},
                    {"gamma_2", e.g2},  {"gamma_3", e.g3}, {"gamma_4", e.g4}, {"gamma_5", e.g5},
                    {"margin", e.margin()}};
  j["constants"] = {{"log_C12", r.constants.log_C12}, {"log_C13", r.constants.log_C13}, {"C14", r.constants.C14}};
  if (r.thresholds) {
    j["thresholds"] = {{"S0", r.thresholds->S0}, {"dominant", r.thresholds->dominant},
                       {"log_H0", r.thresholds->log_H0}};
  }
  j["flags"] = {{"admissible", r.admissible},   {"all_resolved", r.all_resolved},
                {"nu_within", r.nu_within},     {"gr_checked", r.gr_checked},
                {"gr_all_hold", r.gr_all_hold}, {"gr_regime_count", r.gr_regime_count},
                {"above_H0", r.above_H0}};
  return j;
}

std::string shells_csv(const MeasureReport& r) {
  std::ostringstream out;
  out << "index,H,logL_lo,logL_hi,count,complete,argmin\n";
  out.precision(12);
  for (const auto& sh : r.shells) {
    out << sh.index << ',' << std::sqrt(sh.min.H2.get_d()) << ',' << sh.min.log_L_lo() << ',' << sh.min.log_L_hi()
        << ',' << sh.count << ',' << (sh.complete ? "true" : "false") << ',' << join_l(sh.min.l, ';') << '\n';
  }
  return out.str();
}

std::vector<unsigned long> parse_box(const std::string& text) {
  std::vector<unsigned long> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos || part.size() > 9) {
      throw ValidationError("malformed box cap '" + part + "' in '" + text + "'");
    }
    out.push_back(std::stoul(part));
  }
  if (out.empty()) throw ValidationError("empty box");
  return out;
}

}  // namespace heine
