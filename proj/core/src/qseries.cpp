#include "qtheta/qseries.hpp"

#include <string>

#include "kernel_util.hpp"

namespace qtheta {

using detail::check_finite;
using detail::work_tol;

QBase::QBase(XReal q_in) : q(std::move(q_in)) {
  if (!q.is_finite() || !(q.sign() > 0) || !(q < XReal::one(8)))
    throw domain_error("QBase: q must lie strictly in (0,1)");
}

XComplex pochhammer_finite(const XComplex& a, const QBase& base, long n) {
  check_finite(a, "pochhammer_finite");
  const prec_t p = a.prec() > base.q.prec() ? a.prec() : base.q.prec();
  const prec_t w = p + 32;
  const XReal q = base.q.at_prec(w);
  const XComplex one = XComplex::one(w);
  XComplex prod = XComplex::one(w);
  if (n >= 0) {
    XComplex aq = a.at_prec(w);  // a q^k
    for (long k = 0; k < n; ++k) {
      prod *= one - aq;
      aq = aq * q;
    }
    return prod.at_prec(p);
  }
  XComplex aq = a.at_prec(w);  // a q^-k
  for (long k = 1; k <= -n; ++k) {
    aq = aq / q;
    XComplex f = one - aq;
    if (f.is_zero())
      throw singularity_error("pochhammer_finite: factor 1 - a*q^-" + std::to_string(k) +
                              " vanishes exactly");
    prod *= f;
  }
  return (one / prod).at_prec(p);
}

XComplex pochhammer_infinite(const XComplex& a, const QBase& base, const PrecisionContext& ctx) {
  check_finite(a, "pochhammer_infinite");
  const prec_t w = ctx.work_bits();
  const XReal q = base.q.at_prec(w);
  const XReal one = XReal::one(w);
  // Tail certificate |log(1-x)| <= 2|x| for |x| <= 1/2: stop at the first K
  // with |a| q^K <= min(1/2, tol (1-q)/4).
  const XReal thr = min(mul_2si(one, -1), work_tol(w) * (one - q) / XReal::from_si(4, w));
  XComplex aq = a.at_prec(w);
  XComplex prod = XComplex::one(w);
  const XComplex cone = XComplex::one(w);
  while (aq.mag1() > thr) {
    XComplex f = cone - aq;
    if (f.is_zero()) return XComplex::zero(ctx.bits());
    prod *= f;
    aq = aq * q;
  }
  return prod.at_prec(ctx.bits());
}

XComplex euler_qexp_series(const XComplex& z, const QBase& base, const PrecisionContext& ctx) {
  check_finite(z, "euler_qexp_series");
  // For |z| >> 1 with q near 1 the alternating terms overshoot the product
  // value by a factor that can dwarf the default guard bits; retry at larger
  // working precision until enough certified bits survive the cancellation.
  for (prec_t w = ctx.work_bits();;) {
    const XReal q = base.q.at_prec(w);
    const XReal one = XReal::one(w);
    const XReal tol = work_tol(w);
    const XComplex mz = -z.at_prec(w);
    XComplex term = XComplex::one(w);
    XComplex sum = term;
    XReal qpow = one;   // q^k
    XReal qpow1 = q;    // q^{k+1}
    XReal max_mag = term.mag1();
    int consec = 0;
    while (consec < 4) {
      term = term * mz * qpow / (one - qpow1);  // ratio of Eq-style terms
      sum += term;
      XReal m = term.mag1();
      if (m > max_mag) max_mag = m;
      if (m <= tol * max_mag)
        ++consec;
      else
        consec = 0;
      qpow = qpow * q;
      qpow1 = qpow1 * q;
    }
    const long deficit = detail::cancellation_deficit(sum, max_mag, w, ctx.bits());
    if (deficit <= 0) return sum.at_prec(ctx.bits());
    w = detail::escalate_work(w, deficit, "euler_qexp_series");
  }
}

XReal qbinomial_check(const XComplex& a, const XComplex& z, const QBase& base,
                      const PrecisionContext& ctx) {
  check_finite(a, "qbinomial_check");
  check_finite(z, "qbinomial_check");
  if (!(z.abs() < XReal::one(8))) throw domain_error("qbinomial_check: require |z| < 1");

  XComplex lhs = pochhammer_infinite(a * z, base, ctx) / pochhammer_infinite(z, base, ctx);

  const prec_t w = ctx.work_bits();
  const XReal q = base.q.at_prec(w);
  const XReal one = XReal::one(w);
  const XReal tol = work_tol(w);
  const XComplex cone = XComplex::one(w);
  const XComplex zw = z.at_prec(w);
  XComplex term = XComplex::one(w);
  XComplex sum = term;
  XComplex apow = a.at_prec(w);  // a q^k
  XReal qpow1 = q;               // q^{k+1}
  XReal max_mag = term.mag1();
  int consec = 0;
  while (consec < 4) {
    term = term * (cone - apow) * zw / (one - qpow1);
    sum += term;
    XReal m = term.mag1();
    if (m > max_mag) max_mag = m;
    if (m <= tol * max_mag)
      ++consec;
    else
      consec = 0;
    apow = apow * q;
    qpow1 = qpow1 * q;
  }
  return rel_diff(lhs, sum.at_prec(ctx.bits())).at_prec(ctx.bits());
}

QLimitProbe q1_limit_probe(const XComplex& z, const QBase& base, const PrecisionContext& ctx) {
  check_finite(z, "q1_limit_probe");
  const prec_t w = ctx.work_bits();
  const XReal one = XReal::one(w);
  XComplex scaled = (one - base.q.at_prec(w)) * z.at_prec(w);
  XComplex value = euler_qexp_series(scaled, base, ctx);
  XComplex target = exp(-z.at_prec(w));
  XReal deviation = (value.at_prec(w) - target).abs().at_prec(ctx.bits());
  XReal limit = exp(z.abs().at_prec(w)) * (one + ctx.rel_tol().at_prec(w));
  return QLimitProbe{value, deviation, value.abs() <= limit};
}

}  // namespace qtheta
