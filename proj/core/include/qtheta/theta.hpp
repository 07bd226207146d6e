#pragma once

#include "qtheta/qseries.hpp"
#include "qtheta/xcomplex.hpp"

namespace qtheta {

/// theta(z; q) = sum_{k in Z} q^{k^2/2} z^k by the bilateral series,
/// truncated symmetrically at +-K once q^{K^2/2} max(|z|, 1/|z|)^K falls
/// below rel_tol times the largest term seen. Pre: z != 0.
XComplex theta_series(const XComplex& z, const QBase& base, const PrecisionContext& ctx);

/// theta(z; q) = (q;q)_inf (-q^{1/2} z; q)_inf (-q^{1/2}/z; q)_inf
/// (Jacobi triple product). Converges geometrically for any |z|; this is the
/// evaluator the report pipeline uses, with theta_series as cross-check.
XComplex theta_product(const XComplex& z, const QBase& base, const PrecisionContext& ctx);

/// sum_{k >= 0} q^{k^2/2} x^k : the one-sided half of the bilateral series.
XComplex theta_half_upper(const XComplex& x, const QBase& base, const PrecisionContext& ctx);

/// sum_{k <= -1} q^{k^2/2} x^k = sum_{k >= 1} q^{k^2/2} (1/x)^k. Pre: x != 0.
XComplex theta_half_lower(const XComplex& x, const QBase& base, const PrecisionContext& ctx);

/// Tail wing sum_{k >= k0} q^{k^2/2} x^k for k0 >= 0.
XComplex theta_wing_from(const XComplex& x, long k0, const QBase& base,
                         const PrecisionContext& ctx);

}  // namespace qtheta
