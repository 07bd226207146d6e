#include "qtheta/xcomplex.hpp"

namespace qtheta {

XComplex operator/(const XComplex& a, const XComplex& b) {
  if (b.is_zero()) throw domain_error("XComplex division by zero");
  XReal d = b.re_ * b.re_ + b.im_ * b.im_;
  return XComplex((a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d);
}

XComplex ipow(const XComplex& u, long k) {
  const prec_t p = u.prec();
  if (k == 0) return XComplex::one(p);
  if (k < 0 && u.is_zero()) throw domain_error("ipow: zero base with negative exponent");
  unsigned long e = k > 0 ? static_cast<unsigned long>(k) : -static_cast<unsigned long>(k);
  XComplex acc = XComplex::one(p);
  XComplex base = u;
  while (e > 0) {
    if (e & 1UL) acc *= base;
    e >>= 1UL;
    if (e > 0) base *= base;
  }
  if (k < 0) acc = XComplex::one(p) / acc;
  return acc;
}

XComplex exp(const XComplex& z) {
  XReal r = exp(z.real());
  return XComplex(r * cos(z.imag()), r * sin(z.imag()));
}

XReal rel_diff(const XComplex& a, const XComplex& b) {
  XReal denom = max(a.abs(), b.abs());
  if (denom.is_zero()) return XReal::zero(a.prec() > b.prec() ? a.prec() : b.prec());
  return (a - b).abs() / denom;
}

}  // namespace qtheta
