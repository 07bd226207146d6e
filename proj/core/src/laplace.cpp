#include "qtheta/laplace.hpp"

#include <algorithm>
#include <string>

#include "kernel_util.hpp"

namespace qtheta {

using detail::check_finite;
using detail::exact_ratio;
using detail::work_tol;

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

void validate_target_in_set(const RationalScale& t, const mpq_class& lambda) {
  if (lambda < 0 || lambda >= 1) throw domain_error("Scenario: lambda must lie in [0,1)");
  mpz_class jr = lambda.get_num() * t.r();
  if (jr % lambda.get_den() != 0) throw domain_error("Scenario: lambda is not in S(t)");
}

// q^{1/2 - n t} at w bits: the k = 0 value of the term ratio chain.
XReal series_ratio_base(const Scenario& s, std::int64_t n, prec_t w) {
  const XReal q = s.base().q.at_prec(w);
  if (s.is_rational()) {
    mpq_class e = mpq_class(1, 2) - mpq_class(mpz_class(n)) * s.rational_scale().value();
    return pow_real(q, e);
  }
  const prec_t tp = w + ceil_log2(n) + 8;
  XReal tv = s.irrational_scale().value(tp);
  XReal nt(tp);
  mpfr_mul_si(nt.raw(), tv.raw(), static_cast<long>(n), MPFR_RNDN);
  XReal e = XReal::from_mpq(mpq_class(1, 2), tp) - nt;
  return pow_real(q, e).at_prec(w);
}

// sum_{k>=0} q^{k^2/2 - k n t} u^k / (q;q)_k with the 4-consecutive-small-
// terms stop; r0 = q^{1/2 - n t} seeds the exact term-ratio recurrence
//   T_{k+1}/T_k = q^{k + 1/2 - n t} u / (1 - q^{k+1}).
XComplex lhs_series_core(const XReal& q, const XComplex& u, const XReal& r0, prec_t w) {
  const XReal one = XReal::one(w);
  const XReal tol = work_tol(w);
  XComplex term = XComplex::one(w);
  XComplex sum = term;
  XReal ratio = r0;  // q^{k + 1/2 - n t}
  XReal qp1 = q;     // q^{k+1}
  XReal max_mag = term.mag1();
  int consec = 0;
  while (consec < 4) {
    term = term * u * ratio / (one - qp1);
    sum += term;
    XReal m = term.mag1();
    if (m > max_mag) max_mag = m;
    if (m <= tol * max_mag)
      ++consec;
    else
      consec = 0;
    ratio = ratio * q;
    qp1 = qp1 * q;
  }
  return sum;
}

// prod_{k>=0} (1 + q^{k - n t + 1/2} u), the pochhammer tail policy applied
// to a = -q^{1/2 - n t} u.
XComplex lhs_product_core(const XReal& q, const XComplex& u, const XReal& r0, prec_t w) {
  const XReal one = XReal::one(w);
  const XReal thr = min(detail::half_unit(w), work_tol(w) * (one - q) / XReal::from_si(4, w));
  XComplex aq = r0 * u;  // q^{k + 1/2 - n t} u
  XComplex prod = XComplex::one(w);
  const XComplex cone = XComplex::one(w);
  while (aq.mag1() > thr) {
    XComplex f = cone + aq;
    if (f.is_zero()) return XComplex::zero(w);
    prod *= f;
    aq = aq * q;
  }
  return prod;
}

// theta(u^{-1} q^t; q) argument for the main term, t as exact rational.
XComplex theta_argument(const XComplex& u, const XReal& q, const mpq_class& target) {
  return ipow(u, -1) * XComplex(pow_real(q, target));
}

}  // namespace

Scenario::Scenario(QBase base, XComplex u, RationalScale scale, mpq_class lambda)
    : base_(std::move(base)), u_(std::move(u)), scale_(std::move(scale)),
      lambda_(std::move(lambda)), beta_(XReal::zero(64)) {
  check_finite(u_, "Scenario");
  validate_target_in_set(std::get<RationalScale>(scale_), lambda_);
}

Scenario::Scenario(QBase base, XComplex u, IrrationalScale scale, XReal beta)
    : base_(std::move(base)), u_(std::move(u)), scale_(std::move(scale)), lambda_(0),
      beta_(std::move(beta)) {
  check_finite(u_, "Scenario");
  if (!beta_.is_finite() || beta_.sign() < 0 || !(beta_ < XReal::one(8)))
    throw domain_error("Scenario: beta must lie in [0,1)");
}

const mpq_class& Scenario::lambda() const {
  if (!is_rational()) throw domain_error("Scenario: lambda requested from irrational scenario");
  return lambda_;
}

const XReal& Scenario::beta() const {
  if (is_rational()) throw domain_error("Scenario: beta requested from rational scenario");
  return beta_;
}

void Scenario::require_nonzero_u(const char* who) const {
  if (u_.is_zero()) throw domain_error(std::string(who) + ": u must be nonzero");
}

XComplex lhs_series(const Scenario& s, std::int64_t n, const PrecisionContext& ctx) {
  if (n < 1) throw domain_error("lhs_series: n must be >= 1");
  const prec_t w = ctx.work_bits();
  const XReal q = s.base().q.at_prec(w);
  return lhs_series_core(q, s.u().at_prec(w), series_ratio_base(s, n, w), w).at_prec(ctx.bits());
}

XComplex lhs_product(const Scenario& s, std::int64_t n, const PrecisionContext& ctx) {
  if (n < 1) throw domain_error("lhs_product: n must be >= 1");
  const prec_t w = ctx.work_bits();
  const XReal q = s.base().q.at_prec(w);
  return lhs_product_core(q, s.u().at_prec(w), series_ratio_base(s, n, w), w).at_prec(ctx.bits());
}

XComplex rational_main_term(const Scenario& s, std::int64_t m, const PrecisionContext& ctx) {
  if (!s.is_rational()) throw domain_error("rational_main_term: scenario is not rational-scale");
  s.require_nonzero_u("rational_main_term");
  if (m < 0) throw domain_error("rational_main_term: m must be >= 0");
  const prec_t w = ctx.work_bits();
  PrecisionContext inner(w);
  const XReal q = s.base().q.at_prec(w);
  const XComplex u = s.u().at_prec(w);
  XComplex theta = theta_product(theta_argument(u, q, s.lambda()), s.base(), inner);
  XReal poch = pochhammer_infinite(XComplex(q), s.base(), inner).real();
  mpq_class e = exact_ratio(mpz_class(m) * m, 2) + mpq_class(mpz_class(m)) * s.lambda();
  XComplex denom = XComplex(poch * pow_real(q, e));
  return ((ipow(u, m) * theta) / denom).at_prec(ctx.bits());
}

XReal rational_bound(const Scenario& s, std::int64_t m, const PrecisionContext& ctx) {
  if (!s.is_rational()) throw domain_error("rational_bound: scenario is not rational-scale");
  s.require_nonzero_u("rational_bound");
  if (m < 0) throw domain_error("rational_bound: m must be >= 0");
  const prec_t w = ctx.work_bits();
  PrecisionContext inner(w);
  const XReal q = s.base().q.at_prec(w);
  const XReal one = XReal::one(w);
  const XReal uabs = s.u().at_prec(w).abs();
  XReal theta_abs =
      theta_product(XComplex(pow_real(q, s.lambda()) / uabs), s.base(), inner).real();
  XReal front = XReal::from_si(3, w) *
                pochhammer_infinite(XComplex(-q), s.base(), inner).real() * theta_abs / (one - q);
  XReal bracket = pow_real(q, exact_ratio(mpz_class(m), 2)) +
                  pow_real(q, exact_ratio(mpz_class(m) * m, 8)) / pow_si(uabs, m / 2 + 1);
  return (front * bracket).at_prec(ctx.bits());
}

namespace {

void guard_cancellation(const XComplex& resid, const XReal& scale_abs, prec_t bits,
                        const char* who) {
  XReal floor_mag = mul_2si(scale_abs, -(static_cast<long>(bits) - kCancellationGuardBits));
  if (resid.abs() < floor_mag)
    throw precision_error(std::string(who) +
                          ": residual is below the cancellation guard; raise precision");
}

}  // namespace

RationalReport rational_residual(const Scenario& s, const DiophantineHit& hit,
                                 const PrecisionContext& ctx) {
  if (!s.is_rational()) throw domain_error("rational_residual: scenario is not rational-scale");
  s.require_nonzero_u("rational_residual");
  if (!hit.gamma.is_zero())
    throw domain_error("rational_residual: hit must carry gamma = 0 (rational_hits output)");
  const prec_t w = ctx.work_bits();
  PrecisionContext inner(w);
  const XReal q = s.base().q.at_prec(w);
  const XComplex u = s.u().at_prec(w);
  const mpq_class& lam = s.lambda();

  XComplex lhs = lhs_series_core(q, u, series_ratio_base(s, hit.n, w), w);
  XReal poch = pochhammer_infinite(XComplex(q), s.base(), inner).real();
  mpq_class e = exact_ratio(mpz_class(hit.m) * hit.m, 2) + mpq_class(mpz_class(hit.m)) * lam;
  XComplex scale = XComplex(poch * pow_real(q, e)) * ipow(u, -hit.m);
  XComplex theta = theta_product(theta_argument(u, q, lam), s.base(), inner);
  XComplex r = scale * lhs - theta;
  guard_cancellation(r, theta.abs(), ctx.bits(), "rational_residual");

  RationalReport rep;
  rep.n = hit.n;
  rep.m = hit.m;
  rep.lhs = lhs.at_prec(ctx.bits());
  rep.theta_main = theta.at_prec(ctx.bits());
  rep.r_n = r.at_prec(ctx.bits());
  rep.bound = rational_bound(s, hit.m, ctx);
  rep.ratio = (r.abs() / rep.bound.at_prec(w)).at_prec(ctx.bits());
  return rep;
}

DecompositionReport laplace_decomposition(const Scenario& s, const DiophantineHit& hit,
                                          const PrecisionContext& ctx) {
  if (!s.is_rational())
    throw domain_error("laplace_decomposition: scenario is not rational-scale");
  s.require_nonzero_u("laplace_decomposition");
  if (!hit.gamma.is_zero()) throw domain_error("laplace_decomposition: hit must carry gamma = 0");
  const std::int64_t m = hit.m;
  if (m < 0 || m > 1000000) throw domain_error("laplace_decomposition: m out of range");

  const prec_t w = ctx.work_bits();
  PrecisionContext inner(w);
  const XReal q = s.base().q.at_prec(w);
  const XReal one = XReal::one(w);
  const XReal tol = work_tol(w);
  const XComplex u = s.u().at_prec(w);
  const mpq_class& lam = s.lambda();

  // q^1 .. q^{m+1}, then F[j] = (q^{j+1}; q)_inf downward from F[m].
  std::vector<XReal> qpow(static_cast<std::size_t>(m) + 2, XReal(w));
  qpow[0] = one;  // q^0
  for (std::size_t j = 1; j < qpow.size(); ++j) qpow[j] = qpow[j - 1] * q;
  std::vector<XReal> F(static_cast<std::size_t>(m) + 1, XReal(w));
  F[static_cast<std::size_t>(m)] =
      pochhammer_infinite(XComplex(qpow[static_cast<std::size_t>(m) + 1]), s.base(), inner)
          .real();
  for (std::int64_t j = m - 1; j >= 0; --j)
    F[static_cast<std::size_t>(j)] =
        F[static_cast<std::size_t>(j + 1)] * (one - qpow[static_cast<std::size_t>(j) + 1]);

  // s1 = sum_{k=0}^{m} F[k] q^{k^2/2 - km - k lambda} u^k and the s2 tail,
  // via the exact ratio G_{k+1}/G_k = q^{k + 1/2 - m - lambda} u.
  mpq_class e0 = mpq_class(1, 2) - mpq_class(mpz_class(m)) - lam;
  XReal ratio = pow_real(q, e0);
  XComplex g = XComplex::one(w);
  XComplex s1 = XComplex::zero(w);
  for (std::int64_t k = 0; k <= m; ++k) {
    s1 += XComplex(F[static_cast<std::size_t>(k)]) * g;
    g = g * u * ratio;
    ratio = ratio * q;
  }
  XComplex s2 = XComplex::zero(w);
  {
    XReal f = F[static_cast<std::size_t>(m)];
    XReal qp = qpow[static_cast<std::size_t>(m) + 1];  // q^{k} entering k = m+1
    XReal max_mag = XReal::zero(w);
    int consec = 0;
    while (consec < 4) {
      f = f / (one - qp);  // F_{j+1} = F_j / (1 - q^{j+1}); qp enters as q^{m+1}
      s2 += XComplex(f) * g;
      XReal mm = (XComplex(f) * g).mag1();
      if (mm > max_mag) max_mag = mm;
      if (mm <= tol * max_mag)
        ++consec;
      else
        consec = 0;
      g = g * u * ratio;
      ratio = ratio * q;
      qp = qp * q;
    }
  }

  mpq_class se = exact_ratio(mpz_class(m) * m, 2) + mpq_class(mpz_class(m)) * lam;
  XComplex scale = XComplex(pow_real(q, se)) * ipow(u, -m);
  XComplex x = theta_argument(u, q, lam);
  XComplex half_up = theta_half_upper(x, s.base(), inner);
  XComplex half_low = theta_half_lower(x, s.base(), inner);
  XComplex r1 = s1 * scale - half_up;
  XComplex r2 = s2 * scale - half_low;
  guard_cancellation(r1, half_up.abs(), ctx.bits(), "laplace_decomposition(r1)");
  guard_cancellation(r2, half_low.abs(), ctx.bits(), "laplace_decomposition(r2)");

  // Pieces of the re-centered s1: the subtracted upper tail, the
  // (F - 1)-weighted head, and the genuine product tail of the head range.
  const std::int64_t mh = m / 2;
  XComplex s11 = -theta_wing_from(x, mh + 1, s.base(), inner);
  XComplex s12 = XComplex::zero(w);
  XComplex s13 = XComplex::zero(w);
  {
    XComplex t = XComplex::one(w);  // q^{k^2/2} x^k
    XComplex rho = pow_real(q, mpq_class(1, 2)) * x;
    for (std::int64_t k = 0; k <= m; ++k) {
      if (k <= mh) {
        s12 += t * XComplex(F[static_cast<std::size_t>(m - k)] - one);
      } else {
        s13 += t * XComplex(F[static_cast<std::size_t>(m - k)]);
      }
      t = t * rho;
      rho = rho * q;
    }
  }

  const XReal uabs = u.abs();
  XReal theta_abs = theta_product(XComplex(pow_real(q, lam) / uabs), s.base(), inner).real();
  XReal mq_poch = pochhammer_infinite(XComplex(-q), s.base(), inner).real();
  XReal bracket = pow_real(q, exact_ratio(mpz_class(m), 2)) +
                  pow_real(q, exact_ratio(mpz_class(m) * m, 8)) / pow_si(uabs, m / 2 + 1);
  XReal r1_bound = XReal::from_si(2, w) * mq_poch * theta_abs / (one - q) * bracket;
  XReal q3_poch = pochhammer_infinite(XComplex(-(qpow[1] * qpow[1] * qpow[1])), s.base(), inner)
                      .real();
  XReal r2_bound = pow_real(q, m + 2) * q3_poch * theta_abs / (one - q);

  DecompositionReport rep;
  rep.n = hit.n;
  rep.m = m;
  rep.s1 = s1.at_prec(ctx.bits());
  rep.s2 = s2.at_prec(ctx.bits());
  rep.s11 = s11.at_prec(ctx.bits());
  rep.s12 = s12.at_prec(ctx.bits());
  rep.s13 = s13.at_prec(ctx.bits());
  rep.r1_n = r1.at_prec(ctx.bits());
  rep.r2_n = r2.at_prec(ctx.bits());
  rep.r1_bound = r1_bound.at_prec(ctx.bits());
  rep.r2_bound = r2_bound.at_prec(ctx.bits());
  return rep;
}

std::int64_t nu_n(std::int64_t n, const QBase& base) {
  if (n < 1) throw domain_error("nu_n: n must be >= 1");
  if (n == 1) return 0;
  for (prec_t pb : {static_cast<prec_t>(128), static_cast<prec_t>(256), static_cast<prec_t>(512)}) {
    XReal nn = XReal::from_si(static_cast<long>(n), pb);
    XReal ln_lo(pb), ln_hi(pb), lq_lo(pb), lq_hi(pb);
    mpfr_log(ln_lo.raw(), nn.raw(), MPFR_RNDD);
    mpfr_log(ln_hi.raw(), nn.raw(), MPFR_RNDU);
    mpfr_log(lq_lo.raw(), base.q.raw(), MPFR_RNDD);  // log q < 0
    mpfr_log(lq_hi.raw(), base.q.raw(), MPFR_RNDU);
    XReal den_lo = -lq_hi;  // 0 < den_lo <= -log q <= den_hi
    XReal den_hi = -lq_lo;
    XReal lower(pb), upper(pb);
    mpfr_div(lower.raw(), ln_lo.raw(), den_hi.raw(), MPFR_RNDD);
    mpfr_div(upper.raw(), ln_hi.raw(), den_lo.raw(), MPFR_RNDU);
    mpz_class fl = floor(lower).to_mpz_nearest();
    mpz_class fu = floor(upper).to_mpz_nearest();
    if (fl == fu) {
      if (!fl.fits_slong_p()) throw domain_error("nu_n: result exceeds 64-bit range");
      return static_cast<std::int64_t>(fl.get_si());
    }
  }
  // Boundary case: decide q^j >= 1/n exactly in rationals (q is dyadic).
  mpq_class qv = base.q.to_mpq_exact();
  XReal lx = log(XReal::from_si(static_cast<long>(n), 128)) / -log(base.q.at_prec(128));
  mpz_class cand = floor(lx).to_mpz_nearest() + 1;
  if (cand < 0 || cand > (1L << 22) ||
      cand.get_si() * static_cast<long>(mpz_sizeinbase(qv.get_num().get_mpz_t(), 2)) > (1L << 26))
    throw precision_error("nu_n: boundary decision too large to certify");
  unsigned long j = static_cast<unsigned long>(cand.get_si());
  mpz_class num_pow, den_pow;
  mpz_pow_ui(num_pow.get_mpz_t(), qv.get_num().get_mpz_t(), j);
  mpz_pow_ui(den_pow.get_mpz_t(), qv.get_den().get_mpz_t(), j);
  // nu = max j with n q^j >= 1.
  if (n * num_pow >= den_pow) return static_cast<std::int64_t>(j);
  return static_cast<std::int64_t>(j) - 1;
}

IrrationalReport irrational_residual(const Scenario& s, const DiophantineHit& hit,
                                     const PrecisionContext& ctx) {
  if (s.is_rational())
    throw domain_error("irrational_residual: scenario is not irrational-scale");
  s.require_nonzero_u("irrational_residual");
  const prec_t w = ctx.work_bits();
  PrecisionContext inner(w);
  const XReal q = s.base().q.at_prec(w);
  const XComplex u = s.u().at_prec(w);
  const std::int64_t m = hit.m;

  // n t = m + beta + gamma exactly, so the hit supplies every exponent:
  // no re-evaluation of t (and no descriptor precision burden) is needed.
  XReal bg = (hit.beta + hit.gamma).at_prec(w);
  XReal e0 = XReal::from_mpq(exact_ratio(1 - 2 * mpz_class(m), 2), w) - bg;  // 1/2 - n t
  XComplex lhs = lhs_series_core(q, u, pow_real(q, e0), w);

  XReal big_e = XReal::from_mpq(exact_ratio(mpz_class(m) * m, 2), w) +
                XReal::from_si(static_cast<long>(m), w) * bg;  // m n t - m^2/2
  XReal poch = pochhammer_infinite(XComplex(q), s.base(), inner).real();
  XComplex scale = XComplex(poch * pow_real(q, big_e)) * ipow(u, -m);
  XComplex theta =
      theta_product(ipow(u, -1) * XComplex(pow_real(q, hit.beta.at_prec(w))), s.base(), inner);
  XComplex e_n = scale * lhs - theta;
  guard_cancellation(e_n, theta.abs(), ctx.bits(), "irrational_residual");

  IrrationalReport rep;
  rep.n = hit.n;
  rep.m = m;
  rep.gamma_n = hit.gamma.at_prec(ctx.bits());
  rep.nu = nu_n(hit.n, s.base());
  rep.lhs = lhs.at_prec(ctx.bits());
  rep.theta_main = theta.at_prec(ctx.bits());
  rep.e_n = e_n.at_prec(ctx.bits());
  std::int64_t nlog = hit.n < 2 ? 2 : hit.n;
  rep.rate_stat = (e_n.abs() * XReal::from_si(static_cast<long>(hit.n), w) /
                   log(XReal::from_si(static_cast<long>(nlog), w)))
                      .at_prec(ctx.bits());
  return rep;
}

RateEstimate rate_constant_estimate(const std::vector<IrrationalReport>& reports) {
  if (reports.size() < 3)
    throw insufficient_data_error("rate_constant_estimate: need at least 3 reports");
  RateEstimate best;
  best.value = reports.front().rate_stat;
  best.n_at = reports.front().n;
  for (const auto& r : reports) {
    if (r.rate_stat > best.value) {
      best.value = r.rate_stat;
      best.n_at = r.n;
    }
  }
  return best;
}

XReal theta_cross_check(const Scenario& s, const PrecisionContext& ctx) {
  s.require_nonzero_u("theta_cross_check");
  const prec_t w = ctx.work_bits();
  const XReal q = s.base().q.at_prec(w);
  XReal qt = s.is_rational() ? pow_real(q, s.lambda()) : pow_real(q, s.beta().at_prec(w));
  XComplex x = ipow(s.u().at_prec(w), -1) * XComplex(qt);
  return rel_diff(theta_series(x, s.base(), ctx), theta_product(x, s.base(), ctx))
      .at_prec(ctx.bits());
}

}  // namespace qtheta
