// Scenario runner: parses a scenario configuration (KEY=VALUE settings and/or
// a JSON file), drives the library, and writes one report file per run.
//
// Exit codes: 0 all asserted invariants held; 1 malformed configuration (the
// diagnostic names the offending field); 2 an asserted invariant failed;
// 3 precision insufficient even after one doubling.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qtheta/dioph.hpp"
#include "qtheta/format.hpp"
#include "qtheta/laplace.hpp"
#include "qtheta/qseries.hpp"
#include "qtheta/report.hpp"
#include "qtheta/theta.hpp"

namespace {

using namespace qtheta;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Settings: KEY=VALUE tokens override JSON file values; every key must be
// recognized by the selected command.

class Settings {
 public:
  void set_from_flag(const std::string& key, const std::string& value) {
    if (!flag_keys_.insert(key).second)
      throw config_error("duplicate setting: " + key);
    values_[key] = value;
  }

  void set_from_file(const std::string& key, const std::string& value) {
    values_.emplace(key, value);  // flags win: emplace keeps an existing entry
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_str(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_str(const std::string& key) {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error("missing field: " + key);
    return it->second;
  }

  long get_long(const std::string& key, long fallback, long lo, long hi) {
    std::string s = get_str(key, "");
    if (s.empty()) return fallback;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(s, &pos);
    } catch (const std::exception&) {
      throw config_error(key + ": not an integer");
    }
    if (pos != s.size()) throw config_error(key + ": not an integer");
    if (v < lo || v > hi)
      throw config_error(key + ": out of range [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    return v;
  }

  void reject_unconsumed() const {
    for (const auto& kv : values_)
      if (!consumed_.count(kv.first)) throw config_error("unknown field: " + kv.first);
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> flag_keys_;
  std::set<std::string> consumed_;
};

void load_config_file(Settings& kv, const std::string& path, const std::string& cmd) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const auto& val = item.value();
    std::string s;
    if (val.is_string())
      s = val.get<std::string>();
    else if (val.is_number_integer())
      s = std::to_string(val.get<long long>());
    else
      throw config_error(key + ": config values must be strings or integers");
    if (key == "command") {
      if (s != cmd)
        throw config_error("command: config file says '" + s + "' but '" + cmd +
                           "' was invoked");
      continue;
    }
    kv.set_from_file(key, s);
  }
}

// ---------------------------------------------------------------------------
// Field parsers. Every failure names the field.

XReal parse_real_field(const std::string& key, const std::string& s, prec_t prec) {
  try {
    if (s.find('/') != std::string::npos) {
      mpq_class v;
      if (v.set_str(s, 10) != 0) throw domain_error("bad rational");
      if (v.get_den() == 0) throw domain_error("zero denominator");
      v.canonicalize();
      return XReal::from_mpq(v, prec);
    }
    return parse_real(s, prec);
  } catch (const std::exception&) {
    throw config_error(key + ": cannot parse '" + s + "'");
  }
}

XComplex parse_complex_field(const std::string& key, const std::string& s, prec_t prec) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos)
    return XComplex(parse_real_field(key, s, prec), XReal::zero(prec));
  return XComplex(parse_real_field(key, s.substr(0, comma), prec),
                  parse_real_field(key, s.substr(comma + 1), prec));
}

mpq_class parse_rational_field(const std::string& key, const std::string& s) {
  try {
    std::string t = s;
    std::size_t dot = t.find('.');
    if (dot != std::string::npos) {
      // exact decimal -> rational
      std::string digits = t.substr(0, dot) + t.substr(dot + 1);
      std::size_t frac = t.size() - dot - 1;
      mpz_class num(digits.empty() ? "0" : digits);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      mpq_class v(num, den);
      v.canonicalize();
      return v;
    }
    mpq_class v;
    if (v.set_str(t, 10) != 0) throw domain_error("bad rational");
    if (v.get_den() == 0) throw domain_error("zero denominator");
    v.canonicalize();
    return v;
  } catch (const std::exception&) {
    throw config_error(key + ": cannot parse '" + s + "' as a rational");
  }
}

long parse_long_piece(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw config_error(key + ": bad integer '" + s + "'");
  }
  if (pos != s.size()) throw config_error(key + ": bad integer '" + s + "'");
  return v;
}

using ScaleVariant = std::variant<RationalScale, IrrationalScale>;

// t forms: "p/r" or integer (rational); "sqrt:d"; "surd:a,b,c,d" for
// (a + b sqrt(d))/c; a decimal literal (irrational descriptor).
ScaleVariant parse_scale_field(const std::string& s) {
  try {
    if (s.rfind("sqrt:", 0) == 0) {
      long d = parse_long_piece("t", s.substr(5));
      return IrrationalScale::surd(0, 1, 1, d);
    }
    if (s.rfind("surd:", 0) == 0) {
      std::vector<std::string> parts;
      std::string rest = s.substr(5);
      std::size_t pos = 0;
      while (true) {
        std::size_t c = rest.find(',', pos);
        parts.push_back(rest.substr(pos, c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
      }
      if (parts.size() != 4) throw config_error("t: surd needs a,b,c,d");
      return IrrationalScale::surd(parse_long_piece("t", parts[0]),
                                   parse_long_piece("t", parts[1]),
                                   parse_long_piece("t", parts[2]),
                                   parse_long_piece("t", parts[3]));
    }
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos)
      return IrrationalScale::literal(s);
    if (s.find('/') != std::string::npos) {
      std::size_t slash = s.find('/');
      return RationalScale(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
    }
    return RationalScale(mpz_class(s), mpz_class(1));
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("t: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Common run state.

struct Common {
  prec_t bits = 256;
  std::optional<PrecisionContext> ctx;
  std::string out;
  bool json = false;
  std::vector<std::string> failures;

  const PrecisionContext& context() const { return *ctx; }
  XReal tol16() const { return ctx->rel_tol() * XReal::from_si(16, 64); }

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

prec_t env_default_precision() {
  const char* e = std::getenv("QTHETA_PRECISION");
  if (!e) return 256;
  std::string s(e);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw config_error("QTHETA_PRECISION: not an integer");
  }
  if (pos != s.size() || v < 64 || v > (1L << 20))
    throw config_error("QTHETA_PRECISION: must be an integer in [64, 2^20]");
  return static_cast<prec_t>(v);
}

Common parse_common(Settings& kv, const std::string& cmd) {
  Common c;
  c.bits = static_cast<prec_t>(kv.get_long("precision", env_default_precision(), 64, 1L << 20));
  c.ctx.emplace(c.bits);
  std::string fmt = kv.get_str("format", "csv");
  if (fmt == "json")
    c.json = true;
  else if (fmt != "csv")
    throw config_error("format: must be csv or json");
  c.out = kv.get_str("out", "qtheta_" + cmd + (c.json ? ".json" : ".csv"));
  return c;
}

void emit(const Table& t, const Common& c) {
  write_text_file(c.out, c.json ? t.to_json() : t.to_csv());
  std::cout << "report: " << c.out << "\n";
}

int finish(const Table& t, Common& c) {
  emit(t, c);
  if (!c.failures.empty()) {
    for (const auto& f : c.failures) std::cerr << "FAIL: " << f << "\n";
    return 2;
  }
  return 0;
}

std::string cell_bool(bool b) { return b ? "1" : "0"; }

Scenario build_scenario(Settings& kv, const Common& c, const ScaleVariant& scale) {
  QBase base(parse_real_field("q", kv.require_str("q"), c.bits));
  XComplex u = parse_complex_field("u", kv.get_str("u", "1,0"), c.bits);
  if (std::holds_alternative<RationalScale>(scale)) {
    if (kv.has("beta"))
      throw config_error("beta: not applicable to a rational scale (use lambda)");
    mpq_class lambda = parse_rational_field("lambda", kv.get_str("lambda", "0"));
    return Scenario(base, u, std::get<RationalScale>(scale), lambda);
  }
  if (kv.has("lambda"))
    throw config_error("lambda: not applicable to an irrational scale (use beta)");
  XReal beta = parse_real_field("beta", kv.get_str("beta", "0"), c.bits);
  return Scenario(base, u, std::get<IrrationalScale>(scale), beta);
}

void reject_short_literal(const IrrationalScale& t, long n_max) {
  if (!t.is_surd() && n_max > 1000 && t.bits_available() < 64)
    throw config_error(
        "t: a short decimal literal cannot certify hits for n_max > 1000; "
        "give more digits or an exact surd");
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_eval(Settings& kv) {
  Common c = parse_common(kv, "eval");
  ScaleVariant scale = parse_scale_field(kv.require_str("t"));
  Scenario s = build_scenario(kv, c, scale);
  long n0 = kv.get_long("n", 1, 1, 1L << 40);
  long count = kv.get_long("count", 1, 1, 100000);
  kv.reject_unconsumed();

  Table t({"n", "series_re", "series_im", "product_re", "product_im", "rel_diff"});
  XComplex first;
  for (long k = n0; k < n0 + count; ++k) {
    auto pair = with_escalation(c.context(), [&](const PrecisionContext& cx) {
      return std::make_pair(lhs_series(s, k, cx), lhs_product(s, k, cx));
    });
    if (k == n0) first = pair.first;
    XReal rd = rel_diff(pair.first, pair.second);
    t.add_row({cell_int(k), cell(pair.first.real(), c.bits), cell(pair.first.imag(), c.bits),
               cell(pair.second.real(), c.bits), cell(pair.second.imag(), c.bits),
               cell(rd, 64)});
    c.check(rd <= c.tol16(), "rel_diff(series, product) exceeds tolerance at n=" +
                                 std::to_string(k));
  }
  std::cout << "lhs(n=" << n0 << ") = " << cell(first.real(), c.bits) << " + "
            << cell(first.imag(), c.bits) << " i\n";
  return finish(t, c);
}

int cmd_theta(Settings& kv) {
  Common c = parse_common(kv, "theta");
  QBase base(parse_real_field("q", kv.require_str("q"), c.bits));
  XComplex z = parse_complex_field("z", kv.require_str("z"), c.bits);
  kv.reject_unconsumed();

  XComplex se = theta_series(z, base, c.context());
  XComplex pr = theta_product(z, base, c.context());
  XReal rd = rel_diff(se, pr);
  Table t({"z_re", "z_im", "q", "series_re", "series_im", "product_re", "product_im",
           "rel_diff"});
  t.add_row({cell(z.real(), c.bits), cell(z.imag(), c.bits), cell(base.q, c.bits),
             cell(se.real(), c.bits), cell(se.imag(), c.bits), cell(pr.real(), c.bits),
             cell(pr.imag(), c.bits), cell(rd, 64)});
  c.check(rd <= c.tol16(), "rel_diff(theta_series, theta_product) exceeds tolerance");
  std::cout << "theta = " << cell(se.real(), c.bits) << " + " << cell(se.imag(), c.bits)
            << " i, rel_diff = " << cell(rd, 64) << "\n";
  return finish(t, c);
}

int cmd_identities(Settings& kv) {
  Common c = parse_common(kv, "identities");
  QBase base(parse_real_field("q", kv.require_str("q"), c.bits));
  XComplex a = parse_complex_field("a", kv.get_str("a", "0.3,0"), c.bits);
  XComplex z = parse_complex_field("z", kv.get_str("z", "0.5,0"), c.bits);
  long jmax = kv.get_long("jmax", 6, 2, 12);
  kv.reject_unconsumed();

  Table t({"check", "detail", "value", "threshold", "pass"});

  XReal euler_rd = rel_diff(euler_qexp_series(z, base, c.context()),
                            pochhammer_infinite(z, base, c.context()));
  bool euler_ok = euler_rd <= c.tol16();
  t.add_row({"euler", "series vs product", cell(euler_rd, 64), cell(c.tol16(), 64),
             cell_bool(euler_ok)});
  c.check(euler_ok, "euler series/product mismatch");

  XReal qb = qbinomial_check(a, z, base, c.context());
  XReal qb_tol = c.context().rel_tol() * XReal::from_si(8, 64);
  bool qb_ok = qb <= qb_tol;
  t.add_row({"qbinomial", "sum vs quotient", cell(qb, 64), cell(qb_tol, 64), cell_bool(qb_ok)});
  c.check(qb_ok, "q-binomial identity mismatch");

  XReal prev;
  for (long j = 1; j <= jmax; ++j) {
    XReal qj = XReal::one(c.bits) - pow_si(XReal::from_si(10, c.bits), -j);
    QLimitProbe p = q1_limit_probe(z, QBase(qj), c.context());
    bool mono = j == 1 || p.deviation < prev;
    bool ok = p.bound_ok && mono;
    t.add_row({"q1-limit", "j=" + std::to_string(j), cell(p.deviation, 64),
               j == 1 ? std::string() : cell(prev, 64), cell_bool(ok)});
    c.check(ok, "q->1 probe failed at j=" + std::to_string(j));
    prev = p.deviation;
  }
  std::cout << "identities: " << (c.failures.empty() ? "all hold" : "violations found")
            << "\n";
  return finish(t, c);
}

void add_hit_rows(Table& t, const std::vector<DiophantineHit>& hits, Common& c) {
  const XReal three = XReal::from_si(3, c.bits);
  for (const auto& h : hits) {
    XReal ton = three / XReal::from_si(static_cast<long>(h.n), c.bits);
    t.add_row({cell_int(h.n), cell_int(h.m), cell(h.gamma.at_prec(c.bits), c.bits),
               cell(ton, 64), cell_bool(h.floor_matches)});
    c.check(abs(h.gamma) * XReal::from_si(static_cast<long>(h.n), c.bits) <= three,
            "|gamma| * n > 3 at n=" + std::to_string(h.n));
  }
}

int cmd_hits(Settings& kv) {
  Common c = parse_common(kv, "hits");
  ScaleVariant scale = parse_scale_field(kv.require_str("t"));
  long n_max = kv.get_long("n_max", 100, 1, 1000000);
  long count = kv.get_long("count", 0, 0, 1000000);  // 0: no truncation

  std::vector<DiophantineHit> hits;
  if (std::holds_alternative<RationalScale>(scale)) {
    if (kv.has("beta"))
      throw config_error("beta: not applicable to a rational scale (use lambda)");
    const RationalScale& rt = std::get<RationalScale>(scale);
    mpq_class lambda = parse_rational_field("lambda", kv.get_str("lambda", "0"));
    kv.reject_unconsumed();
    std::size_t want = static_cast<std::size_t>(
        mpz_class(mpz_class(n_max) / rt.r() + 2).get_ui());
    hits = rational_hits(rt, lambda, want, 1, c.bits);
    while (!hits.empty() && hits.back().n > n_max) hits.pop_back();
  } else {
    if (kv.has("lambda"))
      throw config_error("lambda: not applicable to an irrational scale (use beta)");
    const IrrationalScale& it = std::get<IrrationalScale>(scale);
    reject_short_literal(it, n_max);
    XReal beta = parse_real_field("beta", kv.get_str("beta", "0"), c.bits);
    kv.reject_unconsumed();
    hits = chebyshev_hits(it, beta, n_max);
  }
  if (count > 0 && hits.size() > static_cast<std::size_t>(count))
    hits.resize(static_cast<std::size_t>(count));

  Table t({"n", "m", "gamma", "three_over_n", "floor_flag"});
  add_hit_rows(t, hits, c);
  std::cout << hits.size() << " hits with n <= " << n_max << "\n";
  return finish(t, c);
}

int cmd_verify_rational(Settings& kv) {
  Common c = parse_common(kv, "verify-rational");
  ScaleVariant scale = parse_scale_field(kv.require_str("t"));
  if (!std::holds_alternative<RationalScale>(scale))
    throw config_error("t: verify-rational requires a rational scale p/r");
  Scenario s = build_scenario(kv, c, scale);
  long count = kv.get_long("count", 8, 1, 500);
  long n_min = kv.get_long("n_min", 1, 1, 1L << 40);
  long m0 = kv.get_long("m0", kDefaultLargeM, 0, 1000000);
  XReal max_ratio = parse_real_field("max_ratio", kv.get_str("max_ratio", "1"), 64);
  kv.reject_unconsumed();

  std::vector<DiophantineHit> hits =
      rational_hits(std::get<RationalScale>(scale), s.lambda(),
                    static_cast<std::size_t>(count), n_min, c.bits);

  XReal tc = theta_cross_check(s, c.context());
  c.check(tc <= c.tol16(), "theta series/product cross-check mismatch");

  Table t({"n", "m", "abs_r", "bound", "ratio", "lhs_mag_log10"});
  t.set_meta("command", "verify-rational");
  t.set_meta("precision", std::to_string(c.bits));
  t.set_meta("theta_cross_check", cell(tc, 64));
  XReal worst = XReal::zero(64);
  std::int64_t worst_n = 0;
  try {
    for (const auto& h : hits) {
      RationalReport rep = with_escalation(
          c.context(), [&](const PrecisionContext& cx) { return rational_residual(s, h, cx); });
      XReal absr = rep.r_n.abs();
      XReal mag = rep.lhs.abs();
      t.add_row({cell_int(rep.n), cell_int(rep.m), cell(absr, c.bits), cell(rep.bound, c.bits),
                 cell(rep.ratio, 64),
                 mag.is_zero() ? std::string("-inf") : cell(log10(mag), 64)});
      if (rep.ratio > worst) {
        worst = rep.ratio;
        worst_n = rep.n;
      }
      if (h.m >= m0)
        c.check(rep.ratio <= max_ratio, "ratio " + cell(rep.ratio, 64) + " > max_ratio at n=" +
                                            std::to_string(rep.n));
    }
  } catch (const precision_error& e) {
    emit(t, c);
    std::cerr << "precision: " << e.what() << "\n";
    return 3;
  }
  std::cout << "worst ratio " << cell(worst, 64) << " at n=" << worst_n << " over "
            << hits.size() << " hits\n";
  return finish(t, c);
}

int cmd_verify_irrational(Settings& kv) {
  Common c = parse_common(kv, "verify-irrational");
  ScaleVariant scale = parse_scale_field(kv.require_str("t"));
  if (!std::holds_alternative<IrrationalScale>(scale))
    throw config_error("t: verify-irrational requires an irrational scale descriptor");
  Scenario s = build_scenario(kv, c, scale);
  long count = kv.get_long("count", 8, 1, 500);
  long n_max = kv.get_long("n_max", 5000, 1, 1000000);
  reject_short_literal(std::get<IrrationalScale>(scale), n_max);
  kv.reject_unconsumed();

  std::vector<DiophantineHit> hits =
      best_hits(chebyshev_hits(std::get<IrrationalScale>(scale), s.beta(), n_max),
                static_cast<std::size_t>(count));
  XReal tc = theta_cross_check(s, c.context());
  c.check(tc <= c.tol16(), "theta series/product cross-check mismatch");
  c.check(!hits.empty(), "no hits with n <= " + std::to_string(n_max));

  Table t({"n", "m", "gamma", "nu_n", "abs_e", "rate_stat"});
  t.set_meta("command", "verify-irrational");
  t.set_meta("precision", std::to_string(c.bits));
  t.set_meta("theta_cross_check", cell(tc, 64));
  std::vector<IrrationalReport> reports;
  try {
    for (const auto& h : hits) {
      IrrationalReport rep = with_escalation(
          c.context(), [&](const PrecisionContext& cx) { return irrational_residual(s, h, cx); });
      reports.push_back(rep);
      t.add_row({cell_int(rep.n), cell_int(rep.m), cell(rep.gamma_n, c.bits), cell_int(rep.nu),
                 cell(rep.e_n.abs(), c.bits), cell(rep.rate_stat, 64)});
    }
  } catch (const precision_error& e) {
    emit(t, c);
    std::cerr << "precision: " << e.what() << "\n";
    return 3;
  }
  if (reports.size() >= 3) {
    RateEstimate est = rate_constant_estimate(reports);
    std::cout << "rate_stat sup = " << cell(est.value, 64) << " at n=" << est.n_at << " ("
              << reports.size() << " reports)\n";
  } else {
    std::cout << reports.size() << " reports (too few for a rate estimate)\n";
  }
  return finish(t, c);
}

int cmd_decompose(Settings& kv) {
  Common c = parse_common(kv, "decompose");
  ScaleVariant scale = parse_scale_field(kv.require_str("t"));
  if (!std::holds_alternative<RationalScale>(scale))
    throw config_error("t: decompose requires a rational scale p/r");
  Scenario s = build_scenario(kv, c, scale);
  long n = kv.get_long("n", 0, 1, 1L << 40);
  long m0 = kv.get_long("m0", kDefaultLargeM, 0, 1000000);
  kv.reject_unconsumed();

  // n must be a lambda-hit: {n t} = lambda, m = n t - lambda integral.
  mpq_class nt = mpq_class(mpz_class(n)) * std::get<RationalScale>(scale).value();
  mpq_class mq = nt - s.lambda();
  if (mq.get_den() != 1)
    throw config_error("n: {n t} != lambda for this scenario (no hit at n=" +
                       std::to_string(n) + ")");
  if (mq.get_num() < 0 || mq.get_num() > 1000000)
    throw config_error("n: hit index m out of range");
  DiophantineHit hit;
  hit.n = n;
  hit.m = static_cast<std::int64_t>(mq.get_num().get_si());
  hit.gamma = XReal::zero(c.bits);
  hit.beta = XReal::zero(c.bits);
  hit.floor_matches = true;

  Table t({"piece", "re", "im", "abs", "bound"});
  t.set_meta("command", "decompose");
  t.set_meta("precision", std::to_string(c.bits));
  try {
    DecompositionReport dec = with_escalation(
        c.context(), [&](const PrecisionContext& cx) { return laplace_decomposition(s, hit, cx); });
    RationalReport rr = with_escalation(
        c.context(), [&](const PrecisionContext& cx) { return rational_residual(s, hit, cx); });

    auto piece = [&](const char* name, const XComplex& v, const std::string& bound) {
      t.add_row({name, cell(v.real(), c.bits), cell(v.imag(), c.bits), cell(v.abs(), c.bits),
                 bound});
    };
    piece("s1", dec.s1, "");
    piece("s2", dec.s2, "");
    piece("s11", dec.s11, "");
    piece("s12", dec.s12, "");
    piece("s13", dec.s13, "");
    piece("r1", dec.r1_n, cell(dec.r1_bound, c.bits));
    piece("r2", dec.r2_n, cell(dec.r2_bound, c.bits));
    piece("r_n", rr.r_n, cell(rr.bound, c.bits));

    // Identity checks at theta scale.
    XComplex lhsv = lhs_series(s, n, c.context());
    XComplex poch = pochhammer_infinite(XComplex(s.base().q), s.base(), c.context());
    c.check(rel_diff(dec.s1 + dec.s2, lhsv * poch) <= c.tol16(),
            "s1 + s2 does not reproduce lhs * (q;q)_inf");

    const prec_t w = c.context().work_bits();
    XReal qw = s.base().q.at_prec(w);
    XComplex uw = s.u().at_prec(w);
    mpq_class se = mpq_class(mpz_class(hit.m) * hit.m) / 2 +
                   mpq_class(mpz_class(hit.m)) * s.lambda();
    se.canonicalize();
    XComplex scalev = XComplex(pow_real(qw, se)) * ipow(uw, -hit.m);
    XComplex x = ipow(uw, -1) * XComplex(pow_real(qw, s.lambda()));
    XComplex hu = theta_half_upper(x, s.base(), c.context());
    XComplex hl = theta_half_lower(x, s.base(), c.context());
    XComplex lhs_side = dec.s1 * scalev;
    XComplex sum_pieces = hu + dec.s11 + dec.s12 + dec.s13;
    c.check(rel_diff(lhs_side, sum_pieces) <= c.tol16(),
            "re-centered s1 does not match half-theta plus s11 + s12 + s13");

    XReal theta_mag = (hu + hl).abs();
    XReal slack = c.tol16() * max(theta_mag, rr.r_n.abs());
    c.check((dec.r1_n + dec.r2_n - rr.r_n).abs() <= slack, "r1 + r2 does not reconstitute r_n");
    if (hit.m >= m0) {
      c.check(dec.r1_n.abs() <= dec.r1_bound, "|r1| exceeds its bound");
      c.check(dec.r2_n.abs() <= dec.r2_bound, "|r2| exceeds its bound");
    }
  } catch (const precision_error& e) {
    emit(t, c);
    std::cerr << "precision: " << e.what() << "\n";
    return 3;
  }
  std::cout << "decomposition at n=" << n << ", m=" << hit.m << ": "
            << (c.failures.empty() ? "all identities hold" : "violations found") << "\n";
  return finish(t, c);
}

int cmd_limit_q1(Settings& kv) {
  Common c = parse_common(kv, "limit-q1");
  XComplex z = parse_complex_field("z", kv.get_str("z", "1,0"), c.bits);
  long jmax = kv.get_long("jmax", 6, 2, 12);
  kv.reject_unconsumed();

  Table t({"j", "q", "value_re", "value_im", "deviation", "bound_ok"});
  XReal prev;
  for (long j = 1; j <= jmax; ++j) {
    XReal qj = XReal::one(c.bits) - pow_si(XReal::from_si(10, c.bits), -j);
    QLimitProbe p = q1_limit_probe(z, QBase(qj), c.context());
    t.add_row({cell_int(j), cell(qj, c.bits), cell(p.value.real(), c.bits),
               cell(p.value.imag(), c.bits), cell(p.deviation, 64), cell_bool(p.bound_ok)});
    c.check(p.bound_ok, "modulus bound violated at j=" + std::to_string(j));
    if (j > 1)
      c.check(p.deviation < prev, "deviation not decreasing at j=" + std::to_string(j));
    prev = p.deviation;
  }
  std::cout << "deviation at j=" << jmax << ": " << cell(prev, 64) << "\n";
  return finish(t, c);
}

int run_command(const std::string& cmd, Settings& kv) {
  if (cmd == "eval") return cmd_eval(kv);
  if (cmd == "theta") return cmd_theta(kv);
  if (cmd == "identities") return cmd_identities(kv);
  if (cmd == "hits") return cmd_hits(kv);
  if (cmd == "verify-rational") return cmd_verify_rational(kv);
  if (cmd == "verify-irrational") return cmd_verify_irrational(kv);
  if (cmd == "decompose") return cmd_decompose(kv);
  if (cmd == "limit-q1") return cmd_limit_q1(kv);
  throw config_error("command: unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-exponential vs theta-function verification reports"};
  app.require_subcommand(1);
  std::vector<std::string> tokens;
  std::string config_path;
  const char* kCmds[] = {"eval",          "theta",    "identities",
                         "hits",          "verify-rational", "verify-irrational",
                         "decompose",     "limit-q1"};
  const char* kDesc[] = {
      "evaluate the scaled q-exponential by series and product",
      "evaluate theta(z; q) by bilateral series and triple product",
      "check the Euler, q-binomial and q->1 limit identities",
      "list Diophantine hits n t = m + target + gamma_n",
      "rational-scale theorem: residuals against the explicit bound",
      "irrational-scale theorem: residuals and the rate statistic",
      "discrete-Laplace proof decomposition at one hit",
      "probe the q -> 1 limit toward exp(-z)"};
  for (std::size_t i = 0; i < 8; ++i) {
    CLI::App* sc = app.add_subcommand(kCmds[i], kDesc[i]);
    sc->add_option("settings", tokens, "KEY=VALUE settings");
    sc->add_option("--config", config_path, "JSON settings file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Settings kv;
    for (const auto& tok : tokens) {
      std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw config_error("malformed setting (expected KEY=VALUE): " + tok);
      kv.set_from_flag(tok.substr(0, eq), tok.substr(eq + 1));
    }
    if (!config_path.empty()) load_config_file(kv, config_path, cmd);
    return run_command(cmd, kv);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qtheta::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qtheta::singularity_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qtheta::precision_error& e) {
    std::cerr << "precision: " << e.what() << "\n";
    return 3;
  } catch (const qtheta::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
