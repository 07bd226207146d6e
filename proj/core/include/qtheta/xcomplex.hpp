#pragma once

#include "qtheta/xreal.hpp"

namespace qtheta {

/// Complex number over XReal. Both parts carry the same precision by
/// construction from a context; mixed-precision operands widen to the max.
class XComplex {
 public:
  XComplex() = default;
  XComplex(XReal re, XReal im) : re_(std::move(re)), im_(std::move(im)) {}
  explicit XComplex(const XReal& re) : re_(re), im_(XReal::zero(re.prec())) {}

  static XComplex zero(prec_t prec) { return XComplex(XReal::zero(prec), XReal::zero(prec)); }
  static XComplex one(prec_t prec) { return XComplex(XReal::one(prec), XReal::zero(prec)); }
  static XComplex from_si(long re, long im, prec_t prec) {
    return XComplex(XReal::from_si(re, prec), XReal::from_si(im, prec));
  }
  /// r * (cos a + i sin a).
  static XComplex polar(const XReal& r, const XReal& a) { return XComplex(r * cos(a), r * sin(a)); }

  const XReal& real() const { return re_; }
  const XReal& imag() const { return im_; }
  prec_t prec() const { return re_.prec() > im_.prec() ? re_.prec() : im_.prec(); }
  XComplex at_prec(prec_t prec) const { return XComplex(re_.at_prec(prec), im_.at_prec(prec)); }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

  XComplex conj() const { return XComplex(re_, -im_); }
  XReal abs() const { return hypot(re_, im_); }
  /// |re| + |im|: a cheap upper bound on |z| (within a factor sqrt(2)),
  /// used by truncation tests where a conservative magnitude suffices.
  XReal mag1() const { return qtheta::abs(re_) + qtheta::abs(im_); }

  XComplex operator-() const { return XComplex(-re_, -im_); }

  friend XComplex operator+(const XComplex& a, const XComplex& b) {
    return XComplex(a.re_ + b.re_, a.im_ + b.im_);
  }
  friend XComplex operator-(const XComplex& a, const XComplex& b) {
    return XComplex(a.re_ - b.re_, a.im_ - b.im_);
  }
  friend XComplex operator*(const XComplex& a, const XComplex& b) {
    return XComplex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
  }
  friend XComplex operator*(const XReal& a, const XComplex& b) { return XComplex(a * b.re_, a * b.im_); }
  friend XComplex operator*(const XComplex& a, const XReal& b) { return b * a; }
  friend XComplex operator/(const XComplex& a, const XComplex& b);
  friend XComplex operator/(const XComplex& a, const XReal& b) { return XComplex(a.re_ / b, a.im_ / b); }

  XComplex& operator+=(const XComplex& rhs) { return *this = *this + rhs; }
  XComplex& operator-=(const XComplex& rhs) { return *this = *this - rhs; }
  XComplex& operator*=(const XComplex& rhs) { return *this = *this * rhs; }

  friend bool operator==(const XComplex& a, const XComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  XReal re_;
  XReal im_;
};

/// u^k by binary exponentiation; relative error <= 2*ceil(log2 |k|) * 2^-P.
/// Pre: u != 0 when k < 0 (division by zero otherwise).
XComplex ipow(const XComplex& u, long k);

/// exp(z) = e^re * (cos im + i sin im).
XComplex exp(const XComplex& z);

/// |a - b| / max(|a|, |b|); 0 when both are zero.
XReal rel_diff(const XComplex& a, const XComplex& b);

}  // namespace qtheta
