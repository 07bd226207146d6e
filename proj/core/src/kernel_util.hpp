#pragma once

#include <string>

#include "qtheta/xcomplex.hpp"
#include "qtheta/xreal.hpp"

namespace qtheta::detail {

// Truncation tolerance used inside kernels: the contract's rel_tol form,
// applied at the guarded working precision so that rounding results back to
// P bits preserves the advertised accuracy even when series terms overshoot
// the final sum.
inline XReal work_tol(prec_t work_bits) {
  return mul_2si(XReal::one(work_bits), -static_cast<long>(work_bits - 16));
}

inline XReal half_unit(prec_t bits) { return mul_2si(XReal::one(bits), -1); }

// A sum whose terms overshoot the result loses log2(peak/|sum|) leading bits
// to cancellation; what survives at working precision w must still cover
// `target` result bits plus rounding slack. Positive return = missing bits.
inline long cancellation_deficit(const XComplex& sum, const XReal& peak, prec_t w, prec_t target) {
  if (peak.is_zero()) return 0;
  const long lost =
      sum.is_zero() ? static_cast<long>(w) : peak.exponent() - sum.mag1().exponent();
  return lost + static_cast<long>(target) + 32 - static_cast<long>(w);
}

// Working precision for a cancellation retry. The observed deficit can only
// underestimate the true one (a drowned sum reads as noise-floor sized), so
// grow at least geometrically to converge in O(log) rounds.
inline prec_t escalate_work(prec_t w, long deficit, const char* who) {
  if (w >= (prec_t{1} << 22))
    throw precision_error(std::string(who) + ": cancellation exceeds supported working precision");
  prec_t next = w + static_cast<prec_t>(deficit) + 64;
  if (next < 2 * w) next = 2 * w;
  return next;
}

inline void check_finite(const XComplex& z, const char* who) {
  if (!z.is_finite()) throw domain_error(std::string(who) + ": argument not finite");
}

// mpq_class(num, den) does not canonicalize; this does.
inline mpq_class exact_ratio(mpz_class num, long den) {
  mpq_class r(std::move(num), mpz_class(den));
  r.canonicalize();
  return r;
}

}  // namespace qtheta::detail
