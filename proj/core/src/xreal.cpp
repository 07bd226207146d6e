#include "qtheta/xreal.hpp"

#include <mutex>

namespace qtheta {

namespace {

constexpr prec_t kMinPrec = 2;

prec_t clamp_prec(prec_t p) { return p < kMinPrec ? kMinPrec : p; }

// Widen the exponent range once, process-wide, so powers like q^(-m^2/2)
// never overflow. MPFR defaults are already near the extremes on 64-bit
// hosts; this makes the requirement explicit.
void ensure_exponent_range() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
  });
}

}  // namespace

XReal::XReal() : XReal(static_cast<prec_t>(64)) {}

XReal::XReal(prec_t prec) {
  ensure_exponent_range();
  mpfr_init2(v_, clamp_prec(prec));
}

XReal::XReal(const XReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

XReal::XReal(XReal&& other) noexcept {
  mpfr_init2(v_, kMinPrec);
  mpfr_swap(v_, other.v_);
}

XReal& XReal::operator=(const XReal& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

XReal& XReal::operator=(XReal&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

XReal::~XReal() { mpfr_clear(v_); }

XReal XReal::zero(prec_t prec) {
  XReal r(prec);
  mpfr_set_zero(r.v_, 1);
  return r;
}

XReal XReal::one(prec_t prec) { return from_si(1, prec); }

XReal XReal::from_si(long v, prec_t prec) {
  XReal r(prec);
  mpfr_set_si(r.v_, v, MPFR_RNDN);
  return r;
}

XReal XReal::from_double(double v, prec_t prec) {
  XReal r(prec);
  mpfr_set_d(r.v_, v, MPFR_RNDN);
  return r;
}

XReal XReal::from_mpq(const mpq_class& v, prec_t prec) {
  XReal r(prec);
  mpfr_set_q(r.v_, v.get_mpq_t(), MPFR_RNDN);
  return r;
}

XReal XReal::pi(prec_t prec) {
  XReal r(prec);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

XReal XReal::at_prec(prec_t prec) const {
  XReal r(prec);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

long XReal::exponent() const {
  if (!is_finite() || is_zero()) throw domain_error("exponent: value is zero or not finite");
  return static_cast<long>(mpfr_get_exp(v_));
}

mpz_class XReal::to_mpz_nearest() const {
  if (!is_finite()) throw domain_error("to_mpz_nearest: value not finite");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
  return z;
}

mpq_class XReal::to_mpq_exact() const {
  if (!is_finite()) throw domain_error("to_mpq_exact: value not finite");
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), v_);
  return q;
}

XReal XReal::operator-() const {
  XReal r(prec());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

namespace {
prec_t max_prec(const XReal& a, const XReal& b) {
  return a.prec() > b.prec() ? a.prec() : b.prec();
}
}  // namespace

#define QTHETA_BINOP(name, fn)                          \
  XReal operator name(const XReal& a, const XReal& b) { \
    XReal r(max_prec(a, b));                            \
    fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);           \
    return r;                                           \
  }

QTHETA_BINOP(+, mpfr_add)
QTHETA_BINOP(-, mpfr_sub)
QTHETA_BINOP(*, mpfr_mul)
QTHETA_BINOP(/, mpfr_div)
#undef QTHETA_BINOP

XReal& XReal::operator+=(const XReal& rhs) { return *this = *this + rhs; }
XReal& XReal::operator-=(const XReal& rhs) { return *this = *this - rhs; }
XReal& XReal::operator*=(const XReal& rhs) { return *this = *this * rhs; }
XReal& XReal::operator/=(const XReal& rhs) { return *this = *this / rhs; }

#define QTHETA_UNOP(name, fn)            \
  XReal name(const XReal& x) {           \
    XReal r(x.prec());                   \
    fn(r.v_, x.v_, MPFR_RNDN);           \
    return r;                            \
  }

QTHETA_UNOP(abs, mpfr_abs)
QTHETA_UNOP(exp, mpfr_exp)
QTHETA_UNOP(log2, mpfr_log2)
QTHETA_UNOP(log10, mpfr_log10)
QTHETA_UNOP(sin, mpfr_sin)
QTHETA_UNOP(cos, mpfr_cos)
#undef QTHETA_UNOP

XReal floor(const XReal& x) {
  XReal r(x.prec());
  mpfr_floor(r.v_, x.v_);
  return r;
}

XReal sqrt(const XReal& x) {
  if (x.sign() < 0) throw domain_error("sqrt: negative argument");
  XReal r(x.prec());
  mpfr_sqrt(r.v_, x.v_, MPFR_RNDN);
  return r;
}

XReal log(const XReal& x) {
  if (x.sign() <= 0) throw domain_error("log: non-positive argument");
  XReal r(x.prec());
  mpfr_log(r.v_, x.v_, MPFR_RNDN);
  return r;
}

XReal hypot(const XReal& a, const XReal& b) {
  XReal r(max_prec(a, b));
  mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

XReal min(const XReal& a, const XReal& b) {
  XReal r(max_prec(a, b));
  mpfr_min(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

XReal max(const XReal& a, const XReal& b) {
  XReal r(max_prec(a, b));
  mpfr_max(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

XReal mul_2si(const XReal& x, long e) {
  XReal r(x.prec());
  mpfr_mul_2si(r.v_, x.v_, e, MPFR_RNDN);
  return r;
}

XReal pow_si(const XReal& x, long k) {
  if (x.is_zero() && k < 0) throw domain_error("pow_si: zero base with negative exponent");
  XReal r(x.prec());
  mpfr_pow_si(r.v_, x.v_, k, MPFR_RNDN);
  return r;
}

namespace {
void check_q_range(const XReal& q, const char* who) {
  if (!(q.sign() > 0 && q < XReal::one(8)))
    throw domain_error(std::string(who) + ": q must lie strictly in (0,1)");
}
}  // namespace

XReal pow_real(const XReal& q, const mpq_class& x) {
  check_q_range(q, "pow_real");
  const prec_t p = q.prec();
  if (x.get_den() == 1) {
    XReal r(p);
    mpfr_pow_z(r.raw(), q.raw(), x.get_num().get_mpz_t(), MPFR_RNDN);
    return r;
  }
  if (x.get_den() == 2) {
    // q^(n/2) = sqrt(q^n); one guarded intermediate keeps the error < 1 ulp.
    XReal t(p + 32);
    mpfr_pow_z(t.raw(), q.raw(), x.get_num().get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(t.raw(), t.raw(), MPFR_RNDN);
    return t.at_prec(p);
  }
  // General rational exponent via exp(x*log q) with 64 guard bits.
  XReal l(p + 64);
  mpfr_log(l.raw(), q.raw(), MPFR_RNDN);
  mpfr_mul_q(l.raw(), l.raw(), x.get_mpq_t(), MPFR_RNDN);
  mpfr_exp(l.raw(), l.raw(), MPFR_RNDN);
  return l.at_prec(p);
}

XReal pow_real(const XReal& q, const XReal& x) {
  check_q_range(q, "pow_real");
  XReal r(max_prec(q, x));
  mpfr_pow(r.raw(), q.raw(), x.raw(), MPFR_RNDN);
  return r;
}

XReal pow_real(const XReal& q, long x) {
  check_q_range(q, "pow_real");
  XReal r(q.prec());
  mpfr_pow_si(r.raw(), q.raw(), x, MPFR_RNDN);
  return r;
}

PrecisionContext::PrecisionContext(prec_t bits)
    : PrecisionContext(bits, mul_2si(XReal::one(bits), -static_cast<long>(bits - 16))) {}

PrecisionContext::PrecisionContext(prec_t bits, XReal rel_tol)
    : bits_(bits), rel_tol_(std::move(rel_tol)) {
  if (bits_ < 64) throw domain_error("PrecisionContext: bits must be >= 64");
  if (!(rel_tol_.sign() > 0) || !(rel_tol_ < XReal::one(8)))
    throw domain_error("PrecisionContext: rel_tol must lie in (0,1)");
}

XReal rel_diff(const XReal& a, const XReal& b) {
  XReal denom = max(abs(a), abs(b));
  if (denom.is_zero()) return XReal::zero(max_prec(a, b));
  return abs(a - b) / denom;
}

}  // namespace qtheta
