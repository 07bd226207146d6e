#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qtheta/dioph.hpp"
#include "qtheta/qseries.hpp"
#include "qtheta/theta.hpp"
#include "qtheta/xcomplex.hpp"

namespace qtheta {

/// Residuals within 32 bits of the P-bit noise floor are rejected as
/// uncertifiable; callers retry once at doubled precision.
inline constexpr long kCancellationGuardBits = 32;

/// Bound assertions apply from this m on ("n and m large enough" made
/// testable); smaller m is reported but not asserted.
inline constexpr std::int64_t kDefaultLargeM = 12;

/// One theorem instance: base q, nonzero complex u, scale t (exact rational
/// or irrational descriptor) and the target lambda in S(t) or beta in [0,1).
/// u = 0 is tolerated at construction so the plain evaluators remain total
/// (their value is exactly 1); every operation that divides by u rejects it.
class Scenario {
 public:
  Scenario(QBase base, XComplex u, RationalScale scale, mpq_class lambda);
  Scenario(QBase base, XComplex u, IrrationalScale scale, XReal beta);

  const QBase& base() const { return base_; }
  const XComplex& u() const { return u_; }
  bool is_rational() const { return std::holds_alternative<RationalScale>(scale_); }
  const RationalScale& rational_scale() const { return std::get<RationalScale>(scale_); }
  const IrrationalScale& irrational_scale() const { return std::get<IrrationalScale>(scale_); }
  const mpq_class& lambda() const;
  const XReal& beta() const;

  void require_nonzero_u(const char* who) const;

 private:
  QBase base_;
  XComplex u_;
  std::variant<RationalScale, IrrationalScale> scale_;
  mpq_class lambda_;
  XReal beta_;
};

/// sum_{k>=0} q^{k^2/2 - k n t} u^k / (q;q)_k  —  the series expansion of
/// (-q^{-nt+1/2} u; q)_inf. The exponent is exact rational when t is.
XComplex lhs_series(const Scenario& s, std::int64_t n, const PrecisionContext& ctx);

/// prod_{k>=0} (1 + q^{k - nt + 1/2} u): the independent product-form oracle
/// for lhs_series, same tail policy as pochhammer_infinite.
XComplex lhs_product(const Scenario& s, std::int64_t n, const PrecisionContext& ctx);

/// u^m theta(u^{-1} q^lambda; q) / ((q;q)_inf q^{m^2/2 + m lambda}).
XComplex rational_main_term(const Scenario& s, std::int64_t m, const PrecisionContext& ctx);

/// 3 (-q;q)_inf theta(|u|^{-1} q^lambda; q) / (1-q) *
///   { q^{m/2} + q^{m^2/8} / |u|^{floor(m/2)+1} }.
XReal rational_bound(const Scenario& s, std::int64_t m, const PrecisionContext& ctx);

struct RationalReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  XComplex lhs;
  XComplex theta_main;  // theta(u^{-1} q^lambda; q)
  XComplex r_n;
  XReal bound;
  XReal ratio;  // |r_n| / bound
};

/// r_n = (q;q)_inf q^{m^2/2 + m lambda} u^{-m} lhs - theta(u^{-1} q^lambda; q)
/// for a gamma = 0 hit. Raises precision_error when |r_n| sits within the
/// cancellation guard of the theta term's noise floor.
RationalReport rational_residual(const Scenario& s, const DiophantineHit& hit,
                                 const PrecisionContext& ctx);

struct DecompositionReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  XComplex s1, s2;            // the split of lhs * (q;q)_inf at k = m
  XComplex s11, s12, s13;     // pieces of the re-centered s1
  XComplex r1_n, r2_n;        // scaled halves minus the theta half-sums
  XReal r1_bound, r2_bound;   // factor-2 bound and q^{m+2}-type bound
};

/// The discrete-Laplace proof decomposition for a rational-scale hit:
/// s1 + s2 partitions lhs*(q;q)_inf; r1 + r2 reconstitutes r_n.
DecompositionReport laplace_decomposition(const Scenario& s, const DiophantineHit& hit,
                                          const PrecisionContext& ctx);

/// floor(-log n / log q), exact: directed-rounding brackets decide, and the
/// boundary case falls back to an exact rational power comparison.
std::int64_t nu_n(std::int64_t n, const QBase& base);

struct IrrationalReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  XReal gamma_n;
  std::int64_t nu = 0;
  XComplex lhs;
  XComplex theta_main;  // theta(u^{-1} q^beta; q)
  XComplex e_n;
  XReal rate_stat;  // |e_n| n / log n (log clamped at log 2 for n = 1)
};

/// e_n = (q;q)_inf q^{m n t - m^2/2} u^{-m} lhs - theta(u^{-1} q^beta; q),
/// the exponent evaluated as m^2/2 + m(beta + gamma_n) so no enormous
/// near-equal quantities are subtracted. Same cancellation guard as the
/// rational case.
IrrationalReport irrational_residual(const Scenario& s, const DiophantineHit& hit,
                                     const PrecisionContext& ctx);

struct RateEstimate {
  XReal value;
  std::int64_t n_at = 0;
};

/// sup of rate_stat over >= 3 reports, with the n attaining it: the
/// empirical stand-in for the theorem's existential constants.
RateEstimate rate_constant_estimate(const std::vector<IrrationalReport>& reports);

/// Cross-check theta(u^{-1} q^target; q) by series vs product; returns the
/// relative difference. Run once per scenario by report drivers.
XReal theta_cross_check(const Scenario& s, const PrecisionContext& ctx);

/// Run f(ctx); on precision_error retry once at doubled bits, then rethrow.
template <typename F>
auto with_escalation(const PrecisionContext& ctx, F&& f) {
  try {
    return f(ctx);
  } catch (const precision_error&) {
    return f(ctx.escalated());
  }
}

}  // namespace qtheta
