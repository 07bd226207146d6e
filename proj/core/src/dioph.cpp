#include "qtheta/dioph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "kernel_util.hpp"

namespace qtheta {

namespace {

prec_t ceil_log2(std::int64_t n) {
  prec_t b = 0;
  std::int64_t v = 1;
  while (v < n) {
    v <<= 1;
    ++b;
  }
  return b;
}

std::int64_t to_i64(const mpz_class& z, const char* who) {
  if (!z.fits_slong_p()) throw domain_error(std::string(who) + ": index exceeds 64-bit range");
  return static_cast<std::int64_t>(z.get_si());
}

}  // namespace

RationalScale::RationalScale(mpz_class p, mpz_class r) {
  if (p <= 0 || r <= 0) throw domain_error("RationalScale: p and r must be positive integers");
  mpz_class g = gcd(p, r);
  p_ = p / g;
  r_ = r / g;
  detail_value_ = mpq_class(p_, r_);
  detail_value_.canonicalize();
}

RationalScale::RationalScale(const mpq_class& t) : RationalScale(t.get_num(), t.get_den()) {}

IrrationalScale IrrationalScale::surd(long a, long b, long c, long d) {
  if (b < 1 || c < 1) throw domain_error("IrrationalScale: require b >= 1 and c >= 1");
  if (d < 2) throw domain_error("IrrationalScale: require d >= 2");
  mpz_class dz(d);
  if (mpz_perfect_square_p(dz.get_mpz_t()))
    throw domain_error("IrrationalScale: d must not be a perfect square");
  // Positivity: a + b sqrt(d) > 0, i.e. a >= 0 or a^2 < b^2 d.
  if (a < 0) {
    mpz_class a2 = mpz_class(a) * a;
    mpz_class bd = mpz_class(b) * b * d;
    if (a2 >= bd) throw domain_error("IrrationalScale: value must be positive");
  }
  IrrationalScale s;
  s.is_surd_ = true;
  s.a_ = a;
  s.b_ = b;
  s.c_ = c;
  s.d_ = d;
  return s;
}

IrrationalScale IrrationalScale::literal(const std::string& decimal) {
  if (decimal.empty()) throw domain_error("IrrationalScale: empty literal");
  bool seen_dot = false;
  bool seen_digit = false;
  for (char ch : decimal) {
    if (ch == '.') {
      if (seen_dot) throw domain_error("IrrationalScale: malformed literal");
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      seen_digit = true;
    } else {
      throw domain_error("IrrationalScale: literal must contain only digits and one '.'");
    }
  }
  if (!seen_digit) throw domain_error("IrrationalScale: literal has no digits");
  IrrationalScale s;
  s.is_surd_ = false;
  s.literal_ = decimal;
  prec_t avail = s.bits_available();
  if (avail < 2 || !(s.value(std::min<prec_t>(avail, 64)) > XReal::zero(8)))
    throw domain_error("IrrationalScale: literal value must be positive");
  return s;
}

prec_t IrrationalScale::bits_available() const {
  if (is_surd_) return static_cast<prec_t>(1) << 30;  // bounded only by memory
  std::size_t sig = 0;
  bool leading = true;
  for (char ch : literal_) {
    if (ch == '.') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++sig;
  }
  return static_cast<prec_t>(static_cast<double>(sig) * 3.3219280948873623);
}

XReal IrrationalScale::value(prec_t prec) const {
  if (is_surd_) {
    XReal s(prec + 32);
    mpfr_sqrt_ui(s.raw(), static_cast<unsigned long>(d_), MPFR_RNDN);
    XReal v = (XReal::from_si(a_, prec + 32) + XReal::from_si(b_, prec + 32) * s) /
              XReal::from_si(c_, prec + 32);
    return v.at_prec(prec);
  }
  if (prec > bits_available())
    throw precision_error("IrrationalScale: literal certifies only " +
                          std::to_string(bits_available()) + " bits, requested " +
                          std::to_string(prec));
  // digits / 10^frac as an exact rational, then one rounding.
  std::string digits;
  long frac = 0;
  bool in_frac = false;
  for (char ch : literal_) {
    if (ch == '.') {
      in_frac = true;
      continue;
    }
    digits += ch;
    if (in_frac) ++frac;
  }
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
  mpq_class v(num, den);
  v.canonicalize();
  return XReal::from_mpq(v, prec);
}

std::vector<mpq_class> fractional_parts(const RationalScale& t) {
  if (t.r() > 1000000) throw domain_error("fractional_parts: denominator too large to enumerate");
  std::vector<mpq_class> out;
  out.reserve(t.r().get_ui());
  for (mpz_class j = 0; j < t.r(); ++j) {
    mpq_class f(j, t.r());
    f.canonicalize();
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<DiophantineHit> rational_hits(const RationalScale& t, const mpq_class& lambda,
                                          std::size_t count, std::int64_t n_min, prec_t prec) {
  if (lambda < 0 || lambda >= 1) throw domain_error("rational_hits: lambda must lie in [0,1)");
  // lambda in S(t) iff lambda * r is an integer.
  mpz_class jr = lambda.get_num() * t.r();
  if (jr % lambda.get_den() != 0)
    throw domain_error("rational_hits: lambda is not in S(t) for this scale");
  mpz_class j = jr / lambda.get_den();  // lambda = j / r, 0 <= j < r

  // {n p / r} = j/r  iff  n p == j (mod r)  iff  n == j p^{-1} (mod r).
  mpz_class pinv;
  if (t.r() == 1) {
    pinv = 0;
  } else if (mpz_invert(pinv.get_mpz_t(), t.p().get_mpz_t(), t.r().get_mpz_t()) == 0) {
    throw domain_error("rational_hits: p has no inverse mod r");  // impossible: gcd = 1
  }
  mpz_class n0 = (j * pinv) % t.r();  // representative in [0, r)
  if (n_min < 1) n_min = 1;

  // First n >= n_min congruent to n0 (mod r).
  mpz_class n(n_min);
  mpz_class rem = ((n0 - n) % t.r() + t.r()) % t.r();
  n += rem;

  std::vector<DiophantineHit> hits;
  hits.reserve(count);
  while (hits.size() < count) {
    mpz_class m = (n * t.p() - j) / t.r();
    DiophantineHit h;
    h.n = to_i64(n, "rational_hits");
    h.m = to_i64(m, "rational_hits");
    h.gamma = XReal::zero(prec);
    h.beta = XReal::from_mpq(lambda, prec);
    h.floor_matches = true;  // m = floor(n t) exactly, since 0 <= lambda < 1
    hits.push_back(std::move(h));
    n += t.r();
  }
  return hits;
}

namespace {

// Exact sign of sqrt(D) - r for non-square D > 0.
int cmp_sqrt(const mpz_class& D, const mpz_class& r) {
  if (r < 0) return 1;
  mpz_class r2 = r * r;
  if (D > r2) return 1;
  if (D < r2) return -1;
  return 0;
}

// Exact floor((P + sqrt(D)) / Q), Q != 0, D > 0 non-square.
mpz_class floor_quadratic(const mpz_class& P, const mpz_class& D, const mpz_class& Q) {
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), D.get_mpz_t());
  mpz_class cand;
  mpz_fdiv_q(cand.get_mpz_t(), mpz_class(P + s).get_mpz_t(), Q.get_mpz_t());
  // x >= v  iff  sqrt(D) >= vQ - P (Q > 0), with the inequality flipped for Q < 0.
  auto at_least = [&](const mpz_class& v) {
    mpz_class rhs = v * Q - P;
    return Q > 0 ? cmp_sqrt(D, rhs) >= 0 : cmp_sqrt(D, rhs) <= 0;
  };
  while (!at_least(cand)) --cand;
  while (at_least(cand + 1)) ++cand;
  return cand;
}

void push_convergent(CfExpansion& cf, const mpz_class& a, mpz_class& h1, mpz_class& h2,
                     mpz_class& k1, mpz_class& k2) {
  mpz_class h = a * h1 + h2;
  mpz_class k = a * k1 + k2;
  h2 = h1;
  h1 = h;
  k2 = k1;
  k1 = k;
  cf.quotients.push_back(a);
  mpq_class c(h, k);
  c.canonicalize();
  cf.convergents.push_back(std::move(c));
}

}  // namespace

CfExpansion cf_expansion(const IrrationalScale& t, std::size_t depth) {
  if (depth < 1) throw domain_error("cf_expansion: depth must be >= 1");
  CfExpansion cf;
  mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1;

  if (t.is_surd()) {
    // State x_k = (P + sqrt(D)) / Q with the invariant Q | D - P^2.
    mpz_class D = mpz_class(t.b()) * t.b() * t.d();
    mpz_class P(t.a());
    mpz_class Q(t.c());
    if ((D - P * P) % Q != 0) {
      P *= Q;
      D *= Q * Q;
      Q *= Q;
    }
    for (std::size_t i = 0; i < depth; ++i) {
      mpz_class a = floor_quadratic(P, D, Q);
      push_convergent(cf, a, h1, h2, k1, k2);
      P = a * Q - P;
      Q = (D - P * P) / Q;
    }
    return cf;
  }

  // Literal: Euclid map on the exact decimal value; valid while the
  // convergent denominators stay within what the digits certify.
  prec_t bits = t.bits_available();
  mpz_class limit = mpz_class(1) << static_cast<unsigned long>(bits);
  XReal v = t.value(bits);
  mpq_class x = v.to_mpq_exact();
  for (std::size_t i = 0; i < depth; ++i) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    mpz_class k_next = a * k1 + k2;
    if (k_next * k_next > limit)
      throw precision_error("cf_expansion: literal precision exhausted at depth " +
                            std::to_string(i + 1));
    push_convergent(cf, a, h1, h2, k1, k2);
    mpq_class frac = x - mpq_class(a);
    if (frac == 0 && i + 1 < depth)
      throw precision_error("cf_expansion: literal terminates before requested depth");
    if (frac == 0) break;
    x = 1 / frac;
  }
  return cf;
}

std::vector<DiophantineHit> chebyshev_hits(const IrrationalScale& t, const XReal& beta,
                                           std::int64_t n_max) {
  if (n_max < 1) throw domain_error("chebyshev_hits: n_max must be >= 1");
  if (n_max > 100000000) throw domain_error("chebyshev_hits: n_max beyond desk scale");
  if (!beta.is_finite() || beta.sign() < 0 || !(beta < XReal::one(8)))
    throw domain_error("chebyshev_hits: beta must lie in [0,1)");

  const prec_t need = ceil_log2(n_max) + 40;
  if (t.bits_available() < need)
    throw precision_error("chebyshev_hits: scale descriptor certifies " +
                          std::to_string(t.bits_available()) + " bits; need >= " +
                          std::to_string(need) + " for n_max " + std::to_string(n_max));

  prec_t w = std::max<prec_t>(beta.prec(), 128) + need;
  if (!t.is_surd() && w > t.bits_available()) w = t.bits_available();
  const XReal tv = t.value(w);
  const XReal b = beta.at_prec(w);
  const XReal three = XReal::from_si(3, w);

  std::vector<DiophantineHit> hits;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    XReal nt(w);
    mpfr_mul_si(nt.raw(), tv.raw(), static_cast<long>(n), MPFR_RNDN);
    XReal d = nt - b;
    mpz_class m = d.to_mpz_nearest();
    if (m < 0) continue;
    XReal gamma = d - XReal::from_mpq(mpq_class(m), w);
    if (abs(gamma) * XReal::from_si(static_cast<long>(n), w) <= three) {
      DiophantineHit h;
      h.n = n;
      h.m = to_i64(m, "chebyshev_hits");
      h.gamma = gamma;
      h.beta = b;
      h.floor_matches = (floor(nt).to_mpz_nearest() == m);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<DiophantineHit> best_hits(const std::vector<DiophantineHit>& hits, std::size_t count) {
  if (hits.empty()) throw domain_error("best_hits: empty hit list");
  std::vector<std::size_t> idx(hits.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<XReal> key;
  key.reserve(hits.size());
  for (const auto& h : hits)
    key.push_back(abs(h.gamma) * XReal::from_si(static_cast<long>(h.n), h.gamma.prec()));
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] < key[b]) return true;
    if (key[b] < key[a]) return false;
    return hits[a].n < hits[b].n;
  });
  if (count < idx.size()) idx.resize(count);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return hits[a].n < hits[b].n; });
  std::vector<DiophantineHit> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(hits[i]);
  return out;
}

}  // namespace qtheta
