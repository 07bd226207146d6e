#include "qtheta/theta.hpp"

#include "kernel_util.hpp"

namespace qtheta {

using detail::check_finite;
using detail::half_unit;
using detail::work_tol;

XComplex theta_series(const XComplex& z, const QBase& base, const PrecisionContext& ctx) {
  check_finite(z, "theta_series");
  if (z.is_zero()) throw domain_error("theta_series: z must be nonzero");
  // Near arg z = +-pi the two wings cancel down to ~exp(-pi^2/(2 log(1/q)))
  // of the peak term, so the working precision may need to grow well past
  // the default guard; retry until enough certified bits survive.
  for (prec_t w = ctx.work_bits();;) {
    const XReal q = base.q.at_prec(w);
    const XReal sq = pow_real(q, mpq_class(1, 2));
    const XReal tol = work_tol(w);
    const XReal half = half_unit(w);
    const XComplex zz = z.at_prec(w);
    const XComplex zi = XComplex::one(w) / zz;

    XComplex sum = XComplex::one(w);  // k = 0
    XReal max_mag = XReal::one(w);
    XComplex tu = sq * zz;        // q^{k^2/2} z^k  at k = 1
    XComplex td = sq * zi;        // q^{k^2/2} z^-k at k = 1
    XComplex ru = (q * sq) * zz;  // term ratio k -> k+1, upper side
    XComplex rd = (q * sq) * zi;
    // Certified envelope b_k = q^{k^2/2} M^k, M = max(|z|, 1/|z|), dominates
    // both wings; the tail after b_K <= tol*max and ratio <= 1/2 is < 2 tol max.
    XReal mm = max(zz.abs(), zi.abs());
    XReal b = sq * mm;
    XReal rb = (q * sq) * mm;
    for (;;) {
      sum += tu;
      sum += td;
      XReal m = max(tu.mag1(), td.mag1());
      if (m > max_mag) max_mag = m;
      tu = tu * ru;
      td = td * rd;
      b = b * rb;
      ru = ru * q;
      rd = rd * q;
      rb = rb * q;
      if (b <= tol * max_mag && rb <= half) break;
    }
    const long deficit = detail::cancellation_deficit(sum, max_mag, w, ctx.bits());
    if (deficit <= 0) return sum.at_prec(ctx.bits());
    w = detail::escalate_work(w, deficit, "theta_series");
  }
}

XComplex theta_product(const XComplex& z, const QBase& base, const PrecisionContext& ctx) {
  check_finite(z, "theta_product");
  if (z.is_zero()) throw domain_error("theta_product: z must be nonzero");
  const prec_t w = ctx.work_bits();
  const XReal q = base.q.at_prec(w);
  const XReal sq = pow_real(q, mpq_class(1, 2));
  const XComplex zz = z.at_prec(w);
  const XComplex msqz = -(sq * zz);
  const XComplex msqi = -(sq * (XComplex::one(w) / zz));
  PrecisionContext inner(w);
  XComplex f1 = pochhammer_infinite(XComplex(q), base, inner);
  XComplex f2 = pochhammer_infinite(msqz, base, inner);
  XComplex f3 = pochhammer_infinite(msqi, base, inner);
  // Grouped as f1*(f2*f3): the z <-> 1/z factor swap is then bitwise exact.
  return (f1 * (f2 * f3)).at_prec(ctx.bits());
}

XComplex theta_wing_from(const XComplex& x, long k0, const QBase& base,
                         const PrecisionContext& ctx) {
  check_finite(x, "theta_wing_from");
  if (k0 < 0) throw domain_error("theta_wing_from: k0 must be >= 0");
  const prec_t w = ctx.work_bits();
  const XReal q = base.q.at_prec(w);
  const XReal tol = work_tol(w);
  const XReal half = half_unit(w);
  const XComplex xw = x.at_prec(w);
  mpz_class kk(k0);
  XComplex t = pow_real(q, detail::exact_ratio(kk * kk, 2)) * ipow(xw, k0);
  XComplex rho = pow_real(q, detail::exact_ratio(mpz_class(2 * k0 + 1), 2)) * xw;  // ratio at k0
  XComplex sum = XComplex::zero(w);
  XReal max_mag = t.mag1();
  for (;;) {
    sum += t;
    XReal m = t.mag1();
    if (m > max_mag) max_mag = m;
    t = t * rho;
    rho = rho * q;
    if (t.mag1() <= tol * max_mag && rho.mag1() <= half) break;
  }
  return sum.at_prec(ctx.bits());
}

XComplex theta_half_upper(const XComplex& x, const QBase& base, const PrecisionContext& ctx) {
  return theta_wing_from(x, 0, base, ctx);
}

XComplex theta_half_lower(const XComplex& x, const QBase& base, const PrecisionContext& ctx) {
  if (x.is_zero()) throw domain_error("theta_half_lower: x must be nonzero");
  return theta_wing_from(XComplex::one(ctx.work_bits()) / x.at_prec(ctx.work_bits()), 1, base, ctx);
}

}  // namespace qtheta
