#include "heine/qdiff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "heine/errors.hpp"

namespace heine {

namespace {

constexpr mpfr_prec_t kBoundPrec = 64;

Interval abs_iv(const FieldElement& e) { return modulus_interval(e, kBoundPrec); }

Interval two_pow_neg(unsigned long e) {
  Integer den = 1;
  den <<= static_cast<mp_bitcnt_t>(e);
  return Interval::from_rational(Rational(Integer(1), den), kBoundPrec);
}

Interval zero_iv() { return Interval::from_integer(0, kBoundPrec); }
Interval one_iv() { return Interval::from_integer(1, kBoundPrec); }

// Lower bound for the modulus of every root of P, from the Cauchy bound of
// the reversed polynomial: |zeta| >= |P_0| / (|P_0| + max_{l>=1} |P_l|).
Interval root_modulus_lower(const Poly& P) {
  Interval p0 = abs_iv(P.coeff(0));
  Interval mx = zero_iv();
  for (long l = 1; l <= P.deg(); ++l) mx = max_upper(mx, abs_iv(P.coeff(static_cast<std::size_t>(l))));
  return p0 / (p0 + mx);
}

// Exact check that P(x q^-k) != 0 for every k >= k_from. Returns the number of
// k values checked exactly; the remaining ones satisfy |x q^-k| < root bound.
unsigned check_no_root_along(const Poly& P, const FieldElement& x, const FieldElement& q, unsigned k_from,
                             unsigned k_min_exact, const std::string& what) {
  if (P.deg() <= 0) return 0;
  Interval rmin = root_modulus_lower(P);
  Interval ax = abs_iv(x);
  Interval aq_inv = one_iv() / abs_iv(q);
  FieldElement q_inv = q.inverse();
  FieldElement point = x * q_inv.pow(static_cast<long>(k_from));
  Interval mag = ax * aq_inv.pow(k_from);
  unsigned checked = 0;
  for (unsigned k = k_from;; ++k) {
    if (k >= k_from + k_min_exact && mag.certainly_less(rmin)) break;
    if (k > 1000000) throw ValidationError(what + ": root search did not terminate");
    if (P.eval(point).is_zero()) throw ValidationError(what + " vanishes at k = " + std::to_string(k));
    ++checked;
    point *= q_inv;
    mag = mag * aq_inv;
  }
  return checked;
}

// Returns true and sets l if r == q^l for some integer l in [l_min, inf).
bool is_power_of(const FieldElement& r, const FieldElement& q, long l_min, long& l_out) {
  if (r.is_zero()) return false;
  double lr = log2_abs(r);
  double lq = log2_abs(q);
  long c = std::lround(lr / lq);
  for (long l = c - 1; l <= c + 1; ++l) {
    if (l < l_min) continue;
    if (q.pow(l) == r) {
      l_out = l;
      return true;
    }
  }
  return false;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Interval power_sum_bound(const Poly& p, const Interval& az, const Interval& scale, long from) {
  // sum_{l >= from} |p_l| az^l scale^l
  Interval acc = zero_iv();
  for (long l = from; l <= p.deg(); ++l) {
    const auto ul = static_cast<unsigned long>(l);
    acc += abs_iv(p.coeff(ul)) * (az * scale).pow(ul);
  }
  return acc;
}

}  // namespace

FieldElement q_pow(const HeineInstance& inst, long e) { return inst.q().pow(e); }

HeineInstance::HeineInstance(Field field, RingElement a, RingElement b, unsigned s, Poly P, std::vector<Poly> Q,
                             std::vector<FieldElement> alphas, FieldElement alpha, unsigned k_max)
    : field_(field),
      a_(std::move(a)),
      b_(std::move(b)),
      s_(s),
      P_(std::move(P)),
      Q_(std::move(Q)),
      alphas_(std::move(alphas)),
      alpha_(std::move(alpha)) {
  auto same = [&](const Field& f, const char* what) {
    if (!(f == field_)) throw ValidationError(std::string(what) + " is not over the instance field");
  };
  same(a_.field(), "q numerator");
  same(b_.field(), "q denominator");
  same(P_.field(), "P");
  same(alpha_.field(), "alpha");
  if (a_.is_zero() || b_.is_zero()) throw ValidationError("q numerator and denominator must be nonzero");
  q_ = FieldElement(a_) / FieldElement(b_);
  if (!(a_.norm() > b_.norm())) throw ValidationError("|q| must exceed 1");
  if (s_ < 1) throw ValidationError("s must be at least 1");
  if (P_.is_zero()) throw ValidationError("P must be nonzero");
  if (P_.deg() > static_cast<long>(s_)) throw ValidationError("deg P must not exceed s");
  if (P_.coeff(0).is_zero()) throw ValidationError("P(0) must be nonzero");
  if (alphas_.empty()) throw ValidationError("at least one alpha_i is required");
  if (Q_.size() != alphas_.size()) throw ValidationError("need exactly one Q_i per alpha_i");
  for (std::size_t i = 0; i < Q_.size(); ++i) {
    same(Q_[i].field(), "Q_i");
    same(alphas_[i].field(), "alpha_i");
    if (Q_[i].is_zero()) throw ValidationError("Q_" + std::to_string(i + 1) + " must be nonzero");
    if (alphas_[i].is_zero()) throw ValidationError("alpha_" + std::to_string(i + 1) + " must be nonzero");
    u_ = std::max(u_, static_cast<unsigned>(Q_[i].deg()));
  }
  if (alpha_.is_zero()) throw ValidationError("evaluation point alpha must be nonzero");

  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas_.size(); ++j) {
      long l = 0;
      if (is_power_of(alphas_[i] / alphas_[j], q_, std::numeric_limits<long>::min(), l)) {
        throw ValidationError("alpha_" + std::to_string(i + 1) + " / alpha_" + std::to_string(j + 1) +
                              " equals q^" + std::to_string(l));
      }
    }
  }
  k_verified_ = check_no_root_along(P_, FieldElement(field_, 1), q_, 0, k_max, "P(q^-k)");
  check_no_root_along(P_, alpha_, q_, 1, 0, "P(alpha q^-k)");
}

HeineInstance HeineInstance::heine_system(Field field, RingElement a, RingElement b, unsigned s, Poly P,
                                          std::vector<FieldElement> alphas) {
  FieldElement q = FieldElement(a) / FieldElement(b);
  std::vector<Poly> Q(alphas.size(), -P);
  return HeineInstance(field, std::move(a), std::move(b), s, std::move(P), std::move(Q), std::move(alphas), q);
}

bool HeineInstance::is_heine_system() const {
  for (const auto& Qi : Q_) {
    if (!(Qi == -P_)) return false;
  }
  return true;
}

bool HeineInstance::solutions_non_polynomial() const {
  if (P_.deg() != static_cast<long>(s_)) return true;
  const FieldElement& Ps = P_.coeff(s_);
  for (const auto& ai : alphas_) {
    long n = 0;
    if (is_power_of(ai / Ps, q_, 1, n)) return false;
  }
  return true;
}

std::string HeineInstance::to_config() const {
  std::ostringstream out;
  out << "field.d = " << (field_.is_rational() ? std::string("rational") : std::to_string(field_.discriminant_seed()))
      << "\n";
  out << "q.a = " << a_.to_string() << "\n";
  out << "q.b = " << b_.to_string() << "\n";
  out << "s = " << s_ << "\n";
  out << "P = " << P_.to_string() << "\n";
  for (std::size_t i = 0; i < Q_.size(); ++i) out << "Q" << i + 1 << " = " << Q_[i].to_string() << "\n";
  for (std::size_t i = 0; i < alphas_.size(); ++i) out << "alpha_" << i + 1 << " = " << alphas_[i].to_string() << "\n";
  out << "alpha = " << alpha_.to_string() << "\n";
  return out.str();
}

HeineInstance HeineInstance::parse_config(std::string_view text, const std::string& origin) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](int line, const std::string& msg) -> ValidationError {
    return ValidationError(origin + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view sv(raw);
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    std::string line = trim(sv);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw fail(line_no, "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) throw fail(line_no, "empty key or value");
    if (kv.count(key)) throw fail(line_no, "duplicate key '" + key + "'");
    kv[key] = {value, line_no};
  }

  auto take = [&](const std::string& key) -> const Entry* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const Entry& {
    const Entry* e = take(key);
    if (!e) throw ValidationError(origin + ": missing key '" + key + "'");
    return *e;
  };
  std::map<std::string, bool> used;
  auto wrap = [&](const std::string& key, const Entry& e, auto&& fn) {
    used[key] = true;
    try {
      return fn(e.value);
    } catch (const ValidationError& err) {
      throw fail(e.line, err.what());
    }
  };

  Field field = Field::rational();
  if (const Entry* e = take("field.d")) field = wrap("field.d", *e, [](const std::string& v) { return Field::parse(v); });
  RingElement a = wrap("q.a", require("q.a"), [&](const std::string& v) { return RingElement::parse(field, v); });
  RingElement b(field, 1);
  if (const Entry* e = take("q.b")) b = wrap("q.b", *e, [&](const std::string& v) { return RingElement::parse(field, v); });
  unsigned s = wrap("s", require("s"), [](const std::string& v) {
    std::size_t pos = 0;
    long val = -1;
    try {
      val = std::stol(v, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != v.size() || val < 1) throw ValidationError("s must be a positive integer");
    return static_cast<unsigned>(val);
  });
  Poly P = wrap("P", require("P"), [&](const std::string& v) { return Poly::parse(field, v); });

  std::vector<FieldElement> alphas;
  std::vector<Poly> Q;
  for (std::size_t i = 1;; ++i) {
    std::string ka = "alpha_" + std::to_string(i);
    const Entry* ea = take(ka);
    if (!ea) break;
    alphas.push_back(wrap(ka, *ea, [&](const std::string& v) { return FieldElement::parse(field, v); }));
    std::string kq = "Q" + std::to_string(i);
    const Entry* eq = take(kq);
    if (!eq) {
      kq = "Q_" + std::to_string(i);
      eq = take(kq);
    }
    // Missing Q_i means the Heine choice Q_i = -P.
    Q.push_back(eq ? wrap(kq, *eq, [&](const std::string& v) { return Poly::parse(field, v); }) : -P);
  }
  FieldElement q = FieldElement(a) / FieldElement(b);
  FieldElement alpha = q;
  if (const Entry* e = take("alpha"))
    alpha = wrap("alpha", *e, [&](const std::string& v) { return FieldElement::parse(field, v); });

  for (const auto& [key, entry] : kv) {
    if (!used.count(key)) throw fail(entry.line, "unknown or orphaned key '" + key + "'");
  }
  try {
    return HeineInstance(field, a, b, s, P, Q, alphas, alpha);
  } catch (const ValidationError& err) {
    throw ValidationError(origin + ": " + err.what());
  }
}

HeineInstance HeineInstance::load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Rational growth_constant(const HeineInstance& inst, std::size_t i) {
  const Poly& P = inst.P();
  const Poly& Q = inst.Q(i);
  Interval aq = abs_iv(inst.q());
  Interval num = abs_iv(inst.alpha_i(i));
  for (long l = 1; l <= P.deg(); ++l) {
    num += abs_iv(P.coeff(static_cast<std::size_t>(l))) / aq.pow(static_cast<unsigned long>(l - 1));
  }
  Interval qmax = zero_iv();
  for (const auto& c : Q.coeffs()) qmax = max_upper(qmax, abs_iv(c));
  Interval c1 = (num + qmax) / abs_iv(P.coeff(0)) + one_iv();
  return c1.upper_rational();
}

void extend_series(const HeineInstance& inst, SeriesPrefix& prefix, std::size_t nu_max) {
  const Field& K = inst.field();
  const Poly& P = inst.P();
  const Poly& Q = inst.Q(prefix.index);
  const FieldElement& alpha = inst.alpha_i(prefix.index);
  const FieldElement P0 = P.coeff(0);
  const unsigned s = inst.s();
  const long t = P.deg();
  const FieldElement& q = inst.q();

  std::size_t start = prefix.f.size();
  // q^nu for nu < nu_max + 1 and P_0^{nu+1} q^{nu(nu+1)/2} at the start index.
  std::vector<FieldElement> qpow(nu_max + 1, FieldElement(K, 1));
  for (std::size_t nu = 1; nu <= nu_max; ++nu) qpow[nu] = qpow[nu - 1] * q;
  FieldElement scale = P0.pow(static_cast<long>(start) + 1) *
                       q.pow(static_cast<long>(start * (start + 1) / 2));
  for (std::size_t nu = start; nu <= nu_max; ++nu) {
    FieldElement rhs = -Q.coeff(nu);
    if (nu >= s) rhs += alpha * prefix.f[nu - s];
    for (long l = 1; l <= t && static_cast<std::size_t>(l) <= nu; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      rhs -= P.coeff(ul) * qpow[nu - ul] * prefix.f[nu - ul];
    }
    FieldElement fnu = rhs / (P0 * qpow[nu]);
    prefix.F.push_back(scale * fnu);
    prefix.f.push_back(std::move(fnu));
    scale *= P0 * qpow[nu] * q;
  }
}

SeriesPrefix series_coefficients(const HeineInstance& inst, std::size_t i, std::size_t nu_max) {
  if (i >= inst.m()) throw ValidationError("series index out of range");
  SeriesPrefix prefix;
  prefix.index = i;
  prefix.C1 = growth_constant(inst, i);
  extend_series(inst, prefix, nu_max);
  return prefix;
}

std::vector<FieldElement> equation_residual(const HeineInstance& inst, const SeriesPrefix& prefix,
                                            std::size_t degree) {
  if (degree >= prefix.f.size()) throw ValidationError("residual degree beyond computed prefix");
  const Field& K = inst.field();
  Poly f(K, std::vector<FieldElement>(prefix.f.begin(), prefix.f.begin() + static_cast<long>(degree) + 1));
  const auto d = static_cast<long>(degree);
  Poly lhs = (f * inst.alpha_i(prefix.index)).shift_up(inst.s()).truncate(d);
  Poly rhs = inst.P().mul_trunc(f.shift_scale(inst.q()), d) + inst.Q(prefix.index).truncate(d);
  Poly r = lhs - rhs;
  std::vector<FieldElement> out(degree + 1, FieldElement(K));
  for (std::size_t k = 0; k <= degree; ++k) out[k] = r.coeff(k);
  return out;
}

namespace {

// Accuracy goal for the tail given the current partial sum.
Interval tail_target(const FieldElement& partial, unsigned bits) {
  Interval floor = two_pow_neg(bits);
  Interval mag = partial.is_zero() ? zero_iv() : abs_iv(partial);
  Interval lo = Interval::from_rational(mag.lower_rational(), kBoundPrec);
  return two_pow_neg(bits + 4) * max_upper(lo, floor);
}

ComplexBox finish(const FieldElement& partial, const Interval& tail, unsigned bits) {
  return to_box(partial, static_cast<mpfr_prec_t>(bits + 16)).inflate(tail);
}

}  // namespace

ComplexBox eval_phi(const HeineInstance& inst, const FieldElement& z, unsigned bits) {
  const Field& K = inst.field();
  const Poly& P = inst.P();
  const FieldElement& q = inst.q();
  const FieldElement q_inv = q.inverse();
  const unsigned s = inst.s();
  Interval az = abs_iv(z);
  Interval aq_inv = one_iv() / abs_iv(q);
  Interval p0 = abs_iv(P.coeff(0));

  FieldElement sum(K);
  FieldElement term(K, 1);       // t_n = z^n q^{-sn(n-1)/2} / prod_{j<n} P(q^-j)
  FieldElement q_inv_n(K, 1);    // q^-n
  for (unsigned long n = 0; n < 1000000; ++n) {
    // Tail from n: ratios t_{j+1}/t_j for j >= n are bounded by |z||q|^{-sn}/L_n.
    if (!term.is_zero()) {
      Interval Ln = p0 - power_sum_bound(P, one_iv(), aq_inv.pow(n), 1);
      if (Ln.positive()) {
        Interval ratio = az * aq_inv.pow(s * n) / Ln;
        if (ratio.certainly_less(one_iv())) {
          Interval tail = abs_iv(term) / (one_iv() - ratio);
          if (tail.certainly_less(tail_target(sum, bits))) return finish(sum, tail, bits);
        }
      }
    } else {
      return finish(sum, zero_iv(), bits);
    }
    sum += term;
    FieldElement pn = P.eval(q_inv_n);
    term *= z * q_inv_n.pow(static_cast<long>(s)) / pn;
    q_inv_n *= q_inv;
  }
  throw InconsistencyError("phi: tail bound did not converge");
}

bool eval_f_series(const HeineInstance& inst, SeriesPrefix& prefix, const FieldElement& z, unsigned bits,
                   ComplexBox& out) {
  const Poly& P = inst.P();
  const std::size_t i = prefix.index;
  const unsigned s = inst.s();
  const long t = P.deg();
  const unsigned w = std::max<unsigned>(s, static_cast<unsigned>(std::max<long>(t, 1)));
  Interval az = abs_iv(z);
  Interval aq_inv = one_iv() / abs_iv(inst.q());
  Interval p0 = abs_iv(P.coeff(0));
  Interval aalpha = abs_iv(inst.alpha_i(i));
  Interval tail_sum_P = power_sum_bound(P, one_iv(), aq_inv, 1);

  // Limit of theta as nu0 -> infinity; if even that is too large, give up.
  Interval theta_inf = tail_sum_P / p0;
  if (!theta_inf.certainly_less(one_iv())) return false;
  if (!(theta_inf.root(w) * az).certainly_less(one_iv())) return false;

  const std::size_t nu_start = std::max<std::size_t>(inst.u() + 1, w);
  const std::size_t nu_cap = 200000;
  if (prefix.f.size() < nu_start + 8) extend_series(inst, prefix, nu_start + 8);

  std::vector<Interval> mods;
  FieldElement sum(inst.field());
  FieldElement zpow(inst.field(), 1);
  for (std::size_t nu0 = 0; nu0 <= nu_cap; ++nu0) {
    if (nu0 >= prefix.f.size()) extend_series(inst, prefix, std::min(nu_cap, prefix.f.size() * 3 / 2 + 8));
    if (nu0 >= nu_start) {
      Interval theta = (aalpha * aq_inv.pow(nu0) + tail_sum_P) / p0;
      if (theta.certainly_less(one_iv())) {
        Interval eta = theta.root(w);
        Interval ez = eta * az;
        if (ez.certainly_less(one_iv())) {
          Interval B = zero_iv();
          for (std::size_t j = nu0 - w; j < nu0; ++j) B = max_upper(B, mods[j]);
          Interval tail = B * az.pow(nu0) * eta / (one_iv() - ez);
          if (tail.certainly_less(tail_target(sum, bits))) {
            out = finish(sum, tail, bits);
            return true;
          }
        }
      }
    }
    const FieldElement& f = prefix.f[nu0];
    mods.push_back(f.is_zero() ? zero_iv() : abs_iv(f));
    sum += f * zpow;
    zpow *= z;
  }
  return false;
}

ComplexBox eval_f_continuation(const HeineInstance& inst, std::size_t i, const FieldElement& z, unsigned bits) {
  const Field& K = inst.field();
  const Poly& P = inst.P();
  const Poly& Q = inst.Q(i);
  const FieldElement& q = inst.q();
  const FieldElement q_inv = q.inverse();
  const unsigned s = inst.s();
  const FieldElement az_s = inst.alpha_i(i) * z.pow(s);
  Interval az = abs_iv(z);
  Interval aq_inv = one_iv() / abs_iv(q);
  Interval p0 = abs_iv(P.coeff(0));
  Interval a_azs = az_s.is_zero() ? zero_iv() : abs_iv(az_s);

  // f(z) = -sum_{i>=1} q^{-si(i-1)/2} Q(z q^-i) (alpha z^s)^{i-1} / prod_{j=1..i} P(z q^-j)
  FieldElement sum(K);
  FieldElement prod(K, 1);       // prod_{j=1}^{n-1} P(z q^-j)
  FieldElement lead(K, 1);       // (alpha z^s)^{n-1} q^{-s n(n-1)/2}
  FieldElement point = z * q_inv;  // z q^-n
  for (unsigned long n = 1; n < 1000000; ++n) {
    Interval scale = aq_inv.pow(n);
    Interval Ln = p0 - power_sum_bound(P, az, scale, 1);
    if (Ln.positive()) {
      Interval Qn = power_sum_bound(Q, az, scale, 0);
      Interval ratio = a_azs * aq_inv.pow(s * n) / Ln;
      if (ratio.certainly_less(one_iv())) {
        Interval Un = lead.is_zero() ? zero_iv() : Qn / Ln * abs_iv(lead) / abs_iv(prod);
        Interval tail = Un / (one_iv() - ratio);
        if (tail.certainly_less(tail_target(sum, bits))) return finish(sum, tail, bits);
      }
    }
    FieldElement pn = P.eval(point);
    if (pn.is_zero()) throw ValidationError("f_i has a pole: P(z q^-" + std::to_string(n) + ") = 0");
    prod *= pn;
    sum -= Q.eval(point) * lead / prod;
    lead *= az_s * q_inv.pow(static_cast<long>(s * n));
    point *= q_inv;
  }
  throw InconsistencyError("f_i continuation: tail bound did not converge");
}

ComplexBox eval_f(const HeineInstance& inst, std::size_t i, const FieldElement& z, unsigned bits) {
  SeriesPrefix prefix = series_coefficients(inst, i, 16);
  ComplexBox out;
  if (eval_f_series(inst, prefix, z, bits, out)) return out;
  return eval_f_continuation(inst, i, z, bits);
}

Downshift downshift_poly(const HeineInstance& inst, std::size_t i, unsigned k) {
  const Field& K = inst.field();
  const FieldElement& q = inst.q();
  const FieldElement q_inv = q.inverse();
  const unsigned s = inst.s();
  const unsigned u = inst.u();
  Poly X = Poly::constant(FieldElement(K, 1));
  Poly Y(K);
  // alpha_i^j z^{sj}
  Poly az_pow = Poly::constant(FieldElement(K, 1));
  const Poly az_s = Poly::monomial(inst.alpha_i(i), s);
  for (unsigned j = 0; j < k; ++j) {
    // Step j -> j+1: X <- q^{s(j+1)+u} P(z q^{-j-1}) X,
    //               Y <- q^{s(j+1)+u} P(z q^{-j-1}) Y + (alpha z^s)^j q^{(s+u)(j+1)} Q(z q^{-j-1}).
    FieldElement shift = q_inv.pow(static_cast<long>(j) + 1);
    Poly Pj = inst.P().shift_scale(shift) * q.pow(static_cast<long>(s * (j + 1) + u));
    X = X * Pj;
    Y = Y * Pj + az_pow * inst.Q(i).shift_scale(shift) * q.pow(static_cast<long>((s + u) * (j + 1)));
    az_pow = az_pow * az_s;
  }
  return {std::move(X), std::move(Y)};
}

std::pair<FieldElement, FieldElement> downshift(const HeineInstance& inst, std::size_t i, unsigned k,
                                                const FieldElement& z) {
  const Field& K = inst.field();
  const FieldElement& q = inst.q();
  const FieldElement q_inv = q.inverse();
  const unsigned s = inst.s();
  const unsigned u = inst.u();
  const FieldElement az_s = inst.alpha_i(i) * z.pow(s);
  FieldElement X(K, 1), Y(K), az_pow(K, 1);
  FieldElement point = z;
  for (unsigned j = 0; j < k; ++j) {
    point *= q_inv;
    FieldElement Pj = inst.P().eval(point) * q.pow(static_cast<long>(s * (j + 1) + u));
    X *= Pj;
    Y = Y * Pj + az_pow * inst.Q(i).eval(point) * q.pow(static_cast<long>((s + u) * (j + 1)));
    az_pow *= az_s;
  }
  return {X, Y};
}

DownshiftBound downshift_bound(const HeineInstance& inst) {
  Interval sum = zero_iv();
  for (const auto& c : inst.P().coeffs()) sum += abs_iv(c);
  DownshiftBound b;
  b.C2 = abs_iv(inst.q()).pow(inst.u()) * sum;
  b.C3 = inst.t();
  return b;
}

}  // namespace heine
