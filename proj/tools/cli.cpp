#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heine/chain.hpp"
#include "heine/errors.hpp"
#include "heine/expo.hpp"
#include "heine/harness.hpp"
#include "heine/parallel.hpp"

namespace heine::cli {

namespace {

// "3", "-7/2" or "0.0248", exactly.
Rational parse_exact(const std::string& text, const std::string& flag) {
  auto bad = [&] { return ValidationError(flag + ": malformed number '" + text + "'"); };
  if (text.empty()) throw bad();
  Rational r;
  const auto dot = text.find('.');
  if (dot == std::string::npos) {
    if (text.find_first_not_of("+-0123456789/") != std::string::npos || r.set_str(text, 10) != 0) throw bad();
    if (r.get_den() == 0) throw bad();
  } else {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    const std::size_t start = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
    if (digits.find_first_not_of("0123456789", start) != std::string::npos) throw bad();
    Integer num(digits.substr(start));
    if (digits[0] == '-') num = -num;
    Integer den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    r = Rational(num, den);
  }
  r.canonicalize();
  return r;
}

std::vector<unsigned> parse_list(const std::string& text, const std::string& flag) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty() || part.size() > 6 || part.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError(flag + ": malformed value '" + text + "'");
    }
    const unsigned v = static_cast<unsigned>(std::stoul(part));
    if (v == 0) throw ValidationError(flag + " must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(flag + " is empty");
  return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ValidationError("write to '" + path + "' failed");
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string box_string(const ComplexBox& b) {
  return "[" + b.re().to_dyadic_string() + "] + i[" + b.im().to_dyadic_string() + "]";
}

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
};

Rational delta_or_default(const std::optional<std::string>& text, std::size_t m) {
  if (text) return parse_exact(*text, "--delta");
  return Rational(1, 2 * static_cast<long>(m));
}

int cmd_eval(const Common& c, const std::optional<std::string>& z_text, unsigned bits, std::ostream& out) {
  if (bits < 16) throw ValidationError("--bits must be at least 16");
  const HeineInstance inst = HeineInstance::load_config(c.config);
  const FieldElement z = z_text ? FieldElement::parse(inst.field(), *z_text) : inst.alpha();
  nlohmann::json j;
  j["z"] = z.to_string();
  j["bits"] = bits;
  const ComplexBox phi = eval_phi(inst, z, bits);
  j["phi"] = {{"box", box_string(phi)}, {"decimal", phi.to_string(30)}};
  nlohmann::json fs = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.m(); ++i) {
    const ComplexBox f = eval_f(inst, i, z, bits);
    fs.push_back({{"index", i + 1}, {"alpha_i", inst.alpha_i(i).to_string()}, {"box", box_string(f)},
                  {"decimal", f.to_string(30)}});
  }
  j["f"] = fs;
  emit(dump(j), c.out, out);
  return 0;
}

int cmd_pade(const Common& c, unsigned N, const std::optional<std::string>& delta, std::ostream& out) {
  const HeineInstance inst = HeineInstance::load_config(c.config);
  const Rational d = delta_or_default(delta, inst.m());
  const BlockProfile prof = BlockProfile::balanced(static_cast<unsigned>(inst.m()), N, d);
  emit(dump(to_json(build_pade(inst, prof))), c.out, out);
  return 0;
}

int cmd_chain(const Common& c, unsigned N, const std::optional<std::string>& delta,
              const std::optional<std::string>& rho, unsigned bits, std::ostream& out) {
  const HeineInstance inst = HeineInstance::load_config(c.config);
  const Rational d = delta_or_default(delta, inst.m());
  const BlockProfile prof = BlockProfile::balanced(static_cast<unsigned>(inst.m()), N, d);
  const Rational r = rho ? parse_exact(*rho, "--rho")
                         : default_rho(static_cast<unsigned>(inst.m()), inst.s(), d, gamma_of(inst));
  const ChainResult res = run_chain(inst, build_pade(inst, prof), r, bits);
  if (!res.certificate.nonzero) throw InconsistencyError("Delta_k = 0");
  if (!res.certificate.factorization_matches) throw InconsistencyError("Delta_k factorization mismatch");
  if (!res.forms.routes_agree) throw InconsistencyError("the two remainder routes disagree");
  emit(dump(to_json(res)), c.out, out);
  return 0;
}

int cmd_exponents(const Common& c, const std::string& m_text, const std::string& s_text,
                  const std::optional<std::string>& gamma_text, const std::optional<std::string>& delta0_text,
                  const std::optional<std::string>& rho_text, std::ostream& out) {
  std::optional<HeineInstance> inst;
  if (!c.config.empty()) inst = HeineInstance::load_config(c.config);
  if (gamma_text && inst) throw ValidationError("give either --gamma or --config, not both");
  const Interval gamma = gamma_text ? exact_interval(parse_exact(*gamma_text, "--gamma"))
                         : inst     ? gamma_of(*inst)
                                    : exact_interval(Rational(0));
  const std::vector<unsigned> ms =
      m_text.empty() ? std::vector<unsigned>{inst ? static_cast<unsigned>(inst->m()) : 1u} : parse_list(m_text, "--m");
  const std::vector<unsigned> ss =
      s_text.empty() ? std::vector<unsigned>{inst ? inst->s() : 1u} : parse_list(s_text, "--s");

  if (delta0_text || rho_text) {
    // Exact gamma_1..gamma_5 at a chosen (delta_0, rho); gamma must be rational.
    if (!gamma_text && inst && !(inst->b().norm() == 1)) {
      throw ValidationError("exact exponents need a rational --gamma");
    }
    const Rational g = gamma_text ? parse_exact(*gamma_text, "--gamma") : Rational(0);
    const Rational d0 = delta0_text ? parse_exact(*delta0_text, "--delta0") : Rational(1, 2);
    nlohmann::json rows = nlohmann::json::array();
    for (unsigned m : ms) {
      for (unsigned s : ss) {
        const Rational rho = rho_text ? parse_exact(*rho_text, "--rho")
                                      : default_rho(m, s, Rational(d0 / m), exact_interval(g));
        Rational r0 = rho - d0;
        r0.canonicalize();
        const ExponentParams p = gammas(m, s, g, d0, r0);
        rows.push_back({{"m", m}, {"s", s}, {"gamma", g.get_str()}, {"delta0", d0.get_str()},
                        {"rho", Rational(rho).get_str()}, {"rho0", r0.get_str()},
                        {"gamma_1", p.g.g1.get_str()}, {"gamma_2", p.g.g2.get_str()},
                        {"gamma_3", p.g.g3.get_str()}, {"gamma_4", p.g.g4.get_str()},
                        {"gamma_5", p.g.g5.get_str()}, {"bound_rho", p.bound_rho},
                        {"bound_gamma", p.bound_gamma}, {"admissible", p.admissible}});
      }
    }
    emit(dump(rows), c.out, out);
    return 0;
  }

  std::string csv = csv_header() + "\n";
  for (unsigned m : ms) {
    for (unsigned s : ss) csv += to_csv(exponent_row(m, s, gamma, gamma_threshold(m, s))) + "\n";
  }
  emit(csv, c.out, out);
  return 0;
}

int cmd_threshold(const Common& c, const std::string& m_text, const std::string& s_text, std::size_t grid,
                  std::ostream& out) {
  const auto ms = parse_list(m_text.empty() ? "1" : m_text, "--m");
  const auto ss = parse_list(s_text.empty() ? "1" : s_text, "--s");
  nlohmann::json rows = nlohmann::json::array();
  for (unsigned m : ms) {
    for (unsigned s : ss) {
      const GammaThreshold g = gamma_threshold(m, s, grid);
      rows.push_back({{"m", m},
                      {"s", s},
                      {"grid", g.grid},
                      {"bracket", g.bracket},
                      {"lo", g.lo.get_str()},
                      {"hi", g.hi.get_str()},
                      {"Gamma", g.enclosure().to_string(15)},
                      {"width", g.width},
                      {"bisection_steps", g.bisection_steps},
                      {"f_zero", g.f_zero.to_string(12)},
                      {"f_lo", g.f_lo.to_string(6)},
                      {"f_hi", g.f_hi.to_string(6)},
                      {"f_zero_positive", g.f_zero.positive()},
                      {"sign_change_certified", g.f_lo.positive() && g.f_hi.negative()}});
    }
  }
  emit(dump(rows), c.out, out);
  return 0;
}

int cmd_verify(const Common& c, const std::string& box, unsigned bits, const std::optional<std::string>& eps,
               const std::optional<std::string>& rho, unsigned N_floor, const std::string& csv,
               std::ostream& out) {
  const HeineInstance inst = HeineInstance::load_config(c.config);
  HarnessOptions o;
  o.box = parse_box(box);
  o.bits = bits;
  if (eps) o.epsilon = parse_exact(*eps, "--epsilon").get_d();
  if (rho) o.rho = parse_exact(*rho, "--rho");
  o.N_floor = N_floor;
  const MeasureReport rep = measure(inst, o);
  emit(dump(to_json(rep)), c.out, out);
  if (!csv.empty()) emit(shells_csv(rep), csv, out);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact-arithmetic toolkit for Baker-type measures of generalized Heine series", "heine"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--threads", c.threads, "Cap on worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", c.config, "Instance config file");
    if (need_config) opt->required();
    sub->add_option("--out", c.out, "Output path (stdout when omitted)");
    sub->add_option("--threads", c.threads, "Cap on worker threads")->check(CLI::NonNegativeNumber);
  };

  std::optional<std::string> z, delta, rho, gamma, delta0, epsilon;
  unsigned bits = 0, N = 0, N_floor = 8;
  std::string m_text, s_text, box, csv;
  std::size_t grid = 10000;

  auto* eval = app.add_subcommand("eval", "Certified enclosures of phi(z) and f_i(z)");
  add_common(eval, true);
  eval->add_option("--z", z, "Evaluation point (default: alpha)");
  eval->add_option("--bits", bits, "Relative precision in bits")->default_val(128);

  auto* pade = app.add_subcommand("pade", "Padé-type approximation of the second kind");
  add_common(pade, true);
  pade->add_option("--N", N, "Degree N")->required();
  pade->add_option("--delta", delta, "delta (default 1/(2m))");

  auto* chain = app.add_subcommand("chain", "Iteration chain, Delta_k certificate and integral forms");
  add_common(chain, true);
  chain->add_option("--N", N, "Degree N")->required();
  chain->add_option("--delta", delta, "delta (default 1/(2m))");
  chain->add_option("--rho", rho, "rho > m delta (default from the exponent calculus)");
  chain->add_option("--bits", bits, "Target relative bits of r")->default_val(128);

  auto* expo = app.add_subcommand("exponents", "Exponent table (CSV) or exact gamma_1..gamma_5 (JSON)");
  add_common(expo, false);
  expo->add_option("--m", m_text, "m, or a comma list");
  expo->add_option("--s", s_text, "s, or a comma list");
  expo->add_option("--gamma", gamma, "gamma in [0, 1) (default: from --config, else 0)");
  expo->add_option("--delta0", delta0, "delta_0 for exact gammas (default 1/2)");
  expo->add_option("--rho", rho, "rho = delta_0 + rho_0 for exact gammas");

  auto* thr = app.add_subcommand("threshold", "Admissibility threshold Gamma(m, s)");
  add_common(thr, false);
  thr->add_option("--m", m_text, "m, or a comma list");
  thr->add_option("--s", s_text, "s, or a comma list");
  thr->add_option("--grid", grid, "Scan points")->default_val(10000)->check(CLI::Range(2, 10000000));

  auto* verify = app.add_subcommand("verify", "Measure harness: enumeration, exponent fit, G/R decomposition");
  add_common(verify, true);
  verify->add_option("--box", box, "Height caps: one value or one per coefficient l_0..l_m")->required();
  verify->add_option("--bits", bits, "Starting precision in bits")->default_val(256);
  verify->add_option("--epsilon", epsilon, "epsilon (default min(1/2, (gamma_5 - m gamma_4)/(4m)))");
  verify->add_option("--rho", rho, "rho for the chain (default from the exponent calculus)");
  verify->add_option("--N", N_floor, "Smallest chain N for G/R")->default_val(8);
  verify->add_option("--csv", csv, "Also write the shells as CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    set_thread_count(c.threads);
    if (eval->parsed()) return cmd_eval(c, z, bits, out);
    if (pade->parsed()) return cmd_pade(c, N, delta, out);
    if (chain->parsed()) return cmd_chain(c, N, delta, rho, bits, out);
    if (expo->parsed()) return cmd_exponents(c, m_text, s_text, gamma, delta0, rho, out);
    if (thr->parsed()) return cmd_threshold(c, m_text, s_text, grid, out);
    if (verify->parsed()) return cmd_verify(c, box, bits, epsilon, rho, N_floor, csv, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InconsistencyError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace heine::cli
