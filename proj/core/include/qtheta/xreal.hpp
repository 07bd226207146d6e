#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>

#include "qtheta/errors.hpp"

namespace qtheta {

using prec_t = mpfr_prec_t;

/// Arbitrary-precision real with a binary exponent range of +-(2^62 - 1),
/// wide enough for the q^{-m^2/2} magnitudes the reports carry. Value
/// semantics over MPFR; every operation rounds to nearest. The result of a
/// binary operation carries max(precision of the operands).
class XReal {
 public:
  XReal();                      // NaN at 64 bits
  explicit XReal(prec_t prec);  // NaN at `prec` bits
  XReal(const XReal& other);
  XReal(XReal&& other) noexcept;
  XReal& operator=(const XReal& other);
  XReal& operator=(XReal&& other) noexcept;
  ~XReal();

  static XReal zero(prec_t prec);
  static XReal one(prec_t prec);
  static XReal from_si(long v, prec_t prec);
  static XReal from_double(double v, prec_t prec);
  static XReal from_mpq(const mpq_class& v, prec_t prec);
  static XReal pi(prec_t prec);

  prec_t prec() const { return mpfr_get_prec(v_); }
  XReal at_prec(prec_t prec) const;  // rounded copy

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with |x| in [2^(e-1), 2^e). Pre: finite nonzero.
  long exponent() const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_si() const { return mpfr_get_si(v_, MPFR_RNDN); }
  mpz_class to_mpz_nearest() const;
  /// Exact rational value (every finite XReal is dyadic). Pre: finite.
  mpq_class to_mpq_exact() const;

  XReal operator-() const;
  XReal& operator+=(const XReal& rhs);
  XReal& operator-=(const XReal& rhs);
  XReal& operator*=(const XReal& rhs);
  XReal& operator/=(const XReal& rhs);

  friend XReal operator+(const XReal& a, const XReal& b);
  friend XReal operator-(const XReal& a, const XReal& b);
  friend XReal operator*(const XReal& a, const XReal& b);
  friend XReal operator/(const XReal& a, const XReal& b);

  friend bool operator==(const XReal& a, const XReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const XReal& a, const XReal& b) { return !(a == b); }
  friend bool operator<(const XReal& a, const XReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const XReal& a, const XReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const XReal& a, const XReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const XReal& a, const XReal& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

  friend XReal abs(const XReal& x);
  friend XReal sqrt(const XReal& x);  // pre: x >= 0
  friend XReal exp(const XReal& x);
  friend XReal log(const XReal& x);  // pre: x > 0
  friend XReal log2(const XReal& x);
  friend XReal log10(const XReal& x);
  friend XReal sin(const XReal& x);
  friend XReal cos(const XReal& x);
  friend XReal floor(const XReal& x);
  friend XReal hypot(const XReal& a, const XReal& b);
  friend XReal min(const XReal& a, const XReal& b);
  friend XReal max(const XReal& a, const XReal& b);
  /// x * 2^e, exact.
  friend XReal mul_2si(const XReal& x, long e);
  /// x^k by MPFR integer power. Pre: x != 0 when k < 0.
  friend XReal pow_si(const XReal& x, long k);

  /// q^x for 0 < q < 1. The exponent is an exact rational, an XReal, or an
  /// integer; relative error <= 4*2^-P at P = precision of q. Exact-rational
  /// exponents are the preferred route when the scale t is rational.
  friend XReal pow_real(const XReal& q, const mpq_class& x);
  friend XReal pow_real(const XReal& q, const XReal& x);
  friend XReal pow_real(const XReal& q, long x);

 private:
  mpfr_t v_;
};

/// Namespace-scope declaration so class members named abs cannot hide it.
XReal abs(const XReal& x);

/// Precision policy for one computation: P-bit operands and results, target
/// relative tolerance for series truncation (default 2^-(P-16)), and the
/// internal guard precision kernels use before rounding back to P bits.
class PrecisionContext {
 public:
  static constexpr prec_t kGuardBits = 48;

  explicit PrecisionContext(prec_t bits);
  PrecisionContext(prec_t bits, XReal rel_tol);

  prec_t bits() const { return bits_; }
  const XReal& rel_tol() const { return rel_tol_; }
  prec_t work_bits() const { return bits_ + kGuardBits; }
  /// Doubled precision with the default tolerance, for one guard retry.
  PrecisionContext escalated() const { return PrecisionContext(2 * bits_); }

 private:
  prec_t bits_;
  XReal rel_tol_;
};

/// |a - b| / max(|a|, |b|); 0 when both are zero.
XReal rel_diff(const XReal& a, const XReal& b);

}  // namespace qtheta
