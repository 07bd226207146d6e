#pragma once

#include "qtheta/xcomplex.hpp"
#include "qtheta/xreal.hpp"

namespace qtheta {

/// The base of all q-products and q-series; 0 < q < 1 strictly.
struct QBase {
  XReal q;
  explicit QBase(XReal q_in);
};

/// (a; q)_n for any integer n:
///   n >= 0 : prod_{k=0}^{n-1} (1 - a q^k), empty product = 1
///   n <  0 : 1 / prod_{k=1}^{-n} (1 - a q^{-k})
/// A vanishing factor at negative n is an exact pole.
XComplex pochhammer_finite(const XComplex& a, const QBase& base, long n);

/// (a; q)_infinity. Truncated at the first K with
/// |a| q^K <= min(1/2, rel_tol (1-q)/4), which certifies the tail product
/// via |log(1-x)| <= 2|x|; relative error <= rel_tol. An exact-zero factor
/// makes the result exactly zero.
XComplex pochhammer_infinite(const XComplex& a, const QBase& base, const PrecisionContext& ctx);

/// (z; q)_infinity via the series sum_k q^{k(k-1)/2} (-z)^k / (q;q)_k.
/// Terms rise before the q^{k^2/2} decay wins, so summation stops only after
/// 4 consecutive terms fall below rel_tol * (max |term| so far).
XComplex euler_qexp_series(const XComplex& z, const QBase& base, const PrecisionContext& ctx);

/// Relative difference between (az;q)_inf / (z;q)_inf and the series
/// sum_k (a;q)_k z^k / (q;q)_k. Requires |z| < 1 strictly.
XReal qbinomial_check(const XComplex& a, const XComplex& z, const QBase& base,
                      const PrecisionContext& ctx);

struct QLimitProbe {
  XComplex value;   // ((1-q) z; q)_infinity
  XReal deviation;  // |value - exp(-z)|
  bool bound_ok;    // |value| <= e^{|z|} (1 + rel_tol)
};

/// Probe of the q -> 1 limit ((1-q)z; q)_inf -> e^{-z} and its bound.
QLimitProbe q1_limit_probe(const XComplex& z, const QBase& base, const PrecisionContext& ctx);

}  // namespace qtheta
