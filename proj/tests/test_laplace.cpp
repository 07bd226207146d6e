#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qtheta/format.hpp"
#include "qtheta/laplace.hpp"

#include "testrng.hpp"

using namespace qtheta;

namespace {

QBase half_base(prec_t bits) { return QBase(XReal::from_mpq(mpq_class(1, 2), bits)); }

Scenario scen_3_2(prec_t bits, double ure = 1.0, double uim = 0.0) {
  return Scenario(half_base(bits),
                  XComplex(XReal::from_double(ure, bits), XReal::from_double(uim, bits)),
                  RationalScale(mpz_class(3), mpz_class(2)), mpq_class(1, 2));
}

XReal tol16(const PrecisionContext& ctx) { return ctx.rel_tol() * XReal::from_si(16, 64); }

}  // namespace

TEST_CASE("scenario validation") {
  prec_t b = 128;
  QBase q = half_base(b);
  XComplex one = XComplex::one(b);
  RationalScale t(mpz_class(3), mpz_class(2));
  CHECK_THROWS_AS(Scenario(q, one, t, mpq_class(1, 3)), domain_error);  // not in S(t)
  CHECK_THROWS_AS(Scenario(q, one, t, mpq_class(-1, 2)), domain_error);
  CHECK_THROWS_AS(Scenario(q, one, t, mpq_class(3, 2)), domain_error);
  CHECK_NOTHROW(Scenario(q, one, t, mpq_class(0)));
  CHECK_THROWS_AS(Scenario(q, XComplex(XReal(b)), t, mpq_class(0)), domain_error);  // NaN u

  IrrationalScale rt2 = IrrationalScale::surd(0, 1, 1, 2);
  CHECK_THROWS_AS(Scenario(q, one, rt2, XReal::one(64)), domain_error);  // beta = 1
  CHECK_THROWS_AS(Scenario(q, one, rt2, XReal::from_double(-0.1, 64)), domain_error);
  CHECK_NOTHROW(Scenario(q, one, rt2, XReal::zero(64)));

  // u = 0 tolerated at construction, rejected by theorem operations
  Scenario z(q, XComplex::zero(b), t, mpq_class(0));
  PrecisionContext ctx(128);
  CHECK_THROWS_AS(rational_main_term(z, 3, ctx), domain_error);
  CHECK_THROWS_AS(rational_bound(z, 3, ctx), domain_error);
}

TEST_CASE("frozen value: lhs at q=1/2, t=1, n=1, u=1") {
  PrecisionContext ctx(256);
  Scenario s(half_base(256), XComplex::one(256), RationalScale(mpz_class(1), mpz_class(1)),
             mpq_class(0));
  XComplex v = lhs_series(s, 1, ctx);
  XReal expect = parse_real("7.79515300693903235435537305867", 256);
  CHECK(rel_diff(v.real(), expect) <= parse_real("1e-28", 64));
  CHECK(v.imag().is_zero());
  CHECK(rel_diff(v, lhs_product(s, 1, ctx)) <= tol16(ctx));
}

TEST_CASE("series equals product across random scenarios") {
  PrecisionContext ctx(256);
  TestRng rng(0x1a91);
  for (int i = 0; i < 6; ++i) {
    QBase b(XReal::from_double(rng.uniform(0.2, 0.8), 256));
    XComplex u(XReal::from_double(rng.uniform(-2, 2), 256),
               XReal::from_double(rng.uniform(-2, 2), 256));
    long p = rng.range(1, 5), r = rng.range(1, 5);
    Scenario s(b, u, RationalScale(mpz_class(p), mpz_class(r)), mpq_class(0));
    long n = rng.range(1, 20);
    CHECK(rel_diff(lhs_series(s, n, ctx), lhs_product(s, n, ctx)) <= tol16(ctx));
  }
  // irrational scale route
  Scenario si(half_base(256), XComplex::one(256), IrrationalScale::surd(0, 1, 1, 2),
              XReal::zero(256));
  for (long n : {1L, 7L, 29L})
    CHECK(rel_diff(lhs_series(si, n, ctx), lhs_product(si, n, ctx)) <= tol16(ctx));
}

TEST_CASE("u = 0 collapses the series to 1") {
  PrecisionContext ctx(128);
  Scenario s(half_base(128), XComplex::zero(128), RationalScale(mpz_class(3), mpz_class(2)),
             mpq_class(0));
  CHECK(lhs_series(s, 5, ctx) == XComplex::one(128));
  CHECK(lhs_product(s, 5, ctx) == XComplex::one(128));
}

TEST_CASE("frozen value: rational bound at q=1/2, u=1, lambda=0, m=15") {
  PrecisionContext ctx(256);
  Scenario s(half_base(256), XComplex::one(256), RationalScale(mpz_class(1), mpz_class(1)),
             mpq_class(0));
  XReal bd = rational_bound(s, 15, ctx);
  XReal expect = parse_real("0.2379315812364697463", 256);
  CHECK(rel_diff(bd, expect) <= parse_real("1e-18", 64));
}

TEST_CASE("rational residuals sit inside the bound and shrink") {
  PrecisionContext ctx(256);
  Scenario s = scen_3_2(256);
  auto hits = rational_hits(s.rational_scale(), s.lambda(), 8, 1, 256);
  XReal prev_abs;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    RationalReport rep = rational_residual(s, hits[i], ctx);
    CHECK(rep.ratio <= XReal::one(64));
    XReal cur = rep.r_n.abs();
    if (i > 0) CHECK(cur < prev_abs);
    prev_abs = cur;
    // residual definition cross-check
    CHECK(rel_diff(rep.lhs, lhs_series(s, hits[i].n, ctx)) <= tol16(ctx));
  }
}

TEST_CASE("rational residual rejects a gamma-carrying hit") {
  PrecisionContext ctx(128);
  Scenario s = scen_3_2(128);
  DiophantineHit h;
  h.n = 1;
  h.m = 1;
  h.gamma = XReal::from_double(0.25, 64);
  CHECK_THROWS_AS(rational_residual(s, h, ctx), domain_error);
}

TEST_CASE("cancellation guard fires at low precision and escalation recovers") {
  // n = 333 for t = 3/2, lambda = 1/2: m = 499, |r_n| ~ q^{m+1/2} ~ 2^-500
  // relative to theta, so any working precision below ~532 bits leaves the
  // residual inside the guard band.
  Scenario s64 = scen_3_2(64);
  auto hits = rational_hits(s64.rational_scale(), s64.lambda(), 1, 333, 64);
  REQUIRE(hits.size() == 1);
  REQUIRE(hits[0].n == 333);
  CHECK(hits[0].m == 499);

  PrecisionContext p64(64);
  CHECK_THROWS_AS(rational_residual(s64, hits[0], p64), precision_error);
  // one doubling (64 -> 128) is still inside the guard
  CHECK_THROWS_AS(with_escalation(p64, [&](const PrecisionContext& c) {
                    return rational_residual(s64, hits[0], c);
                  }),
                  precision_error);

  // 512 -> 1024 crosses it: with_escalation succeeds where the direct call fails
  Scenario s512 = scen_3_2(512);
  PrecisionContext p512(512);
  CHECK_THROWS_AS(rational_residual(s512, hits[0], p512), precision_error);
  RationalReport rep = with_escalation(
      p512, [&](const PrecisionContext& c) { return rational_residual(s512, hits[0], c); });
  CHECK(rep.ratio <= XReal::one(64));
  CHECK(rep.r_n.abs() > XReal::zero(64));
}

TEST_CASE("decomposition identities at a mid-size hit") {
  PrecisionContext ctx(256);
  Scenario s = scen_3_2(256, 1.0, 1.0);  // u = 1 + i
  auto hits = rational_hits(s.rational_scale(), s.lambda(), 8, 1, 256);
  const DiophantineHit& h = hits.back();  // n = 15, m = 22
  REQUIRE(h.m >= kDefaultLargeM);

  DecompositionReport dec = laplace_decomposition(s, h, ctx);
  RationalReport rr = rational_residual(s, h, ctx);

  // partition: s1 + s2 = lhs * (q;q)_inf
  XComplex lhsq = lhs_series(s, h.n, ctx) * pochhammer_infinite(XComplex(s.base().q), s.base(), ctx);
  CHECK(rel_diff(dec.s1 + dec.s2, lhsq) <= tol16(ctx));

  // bounds
  CHECK(dec.r1_n.abs() <= dec.r1_bound);
  CHECK(dec.r2_n.abs() <= dec.r2_bound);

  // reconstitution at theta scale
  XReal scale = max(rr.theta_main.abs(), rr.r_n.abs());
  CHECK((dec.r1_n + dec.r2_n - rr.r_n).abs() <= tol16(ctx) * scale);

  // re-centered s1 against the half-theta and its correction pieces
  const prec_t w = ctx.work_bits();
  XReal qw = s.base().q.at_prec(w);
  XComplex uw = s.u().at_prec(w);
  mpq_class e = mpq_class(mpz_class(h.m) * h.m) / 2 + mpq_class(mpz_class(h.m)) * s.lambda();
  e.canonicalize();
  XComplex scalev = XComplex(pow_real(qw, e)) * ipow(uw, -h.m);
  XComplex x = ipow(uw, -1) * XComplex(pow_real(qw, s.lambda()));
  XComplex upper = theta_half_upper(x, s.base(), ctx);
  CHECK(rel_diff(dec.s1 * scalev, upper + dec.s11 + dec.s12 + dec.s13) <= tol16(ctx));
}

TEST_CASE("nu_n against hand values") {
  QBase b = half_base(128);
  CHECK(nu_n(1, b) == 0);
  CHECK(nu_n(2, b) == 1);
  CHECK(nu_n(3, b) == 1);
  CHECK(nu_n(4, b) == 2);   // boundary: log2(4) = 2 exactly
  CHECK(nu_n(8, b) == 3);   // boundary: log2(8) = 3 exactly
  CHECK(nu_n(1024, b) == 10);
  CHECK(nu_n(1025, b) == 10);
  QBase b9(XReal::from_double(0.9, 128));
  CHECK(nu_n(2, b9) == 6);  // ln 2 / ln(10/9) = 6.578...
  CHECK_THROWS_AS(nu_n(0, b), domain_error);
}

TEST_CASE("irrational residual and rate statistic") {
  PrecisionContext ctx(256);
  Scenario s(half_base(256), XComplex::one(256), IrrationalScale::surd(0, 1, 1, 2),
             XReal::zero(256));
  auto hits = best_hits(chebyshev_hits(s.irrational_scale(), s.beta(), 500), 5);
  REQUIRE(hits.size() == 5);
  std::vector<IrrationalReport> reports;
  for (const auto& h : hits) {
    IrrationalReport rep = with_escalation(
        ctx, [&](const PrecisionContext& c) { return irrational_residual(s, h, c); });
    CHECK(rep.e_n.is_finite());
    CHECK(rep.nu == nu_n(h.n, s.base()));
    // rate_stat = |e_n| n / log n (log clamped at log 2)
    long nl = h.n < 2 ? 2 : h.n;
    XReal expect = rep.e_n.abs() * XReal::from_si(static_cast<long>(h.n), 256) /
                   log(XReal::from_si(nl, 256));
    CHECK(rel_diff(rep.rate_stat, expect) <= mul_2si(XReal::one(64), -200));
    reports.push_back(rep);
  }
  RateEstimate est = rate_constant_estimate(reports);
  CHECK(est.value >= reports.front().rate_stat);
  bool attained = false;
  for (const auto& r : reports)
    if (r.n == est.n_at && r.rate_stat == est.value) attained = true;
  CHECK(attained);

  reports.resize(2);
  CHECK_THROWS_AS(rate_constant_estimate(reports), insufficient_data_error);
}

TEST_CASE("gamma = 0 reduction: irrational pipeline matches rational") {
  PrecisionContext ctx(256);
  QBase b(XReal::from_double(0.6, 256));
  XComplex u(XReal::from_double(1.0, 256), XReal::from_double(1.0, 256));

  // t = 3/2 via a long literal; beta = 1/2 exactly; hits at odd n have gamma = 0
  IrrationalScale lit = IrrationalScale::literal("1.500000000000000000000000000000000000000");
  XReal beta = XReal::from_mpq(mpq_class(1, 2), 256);
  Scenario si(b, u, lit, beta);

  RationalScale rt(mpz_class(3), mpz_class(2));
  Scenario sr(b, u, rt, mpq_class(1, 2));

  auto rhits = rational_hits(rt, mpq_class(1, 2), 3, 9, 256);
  for (const auto& rh : rhits) {
    // rational hits carry beta = lambda and gamma = 0: feed them unchanged
    IrrationalReport ir = irrational_residual(si, rh, ctx);
    RationalReport rr = rational_residual(sr, rh, ctx);
    XReal scale = max(rr.theta_main.abs(), rr.r_n.abs());
    CHECK((ir.e_n - rr.r_n).abs() <= tol16(ctx) * scale);
    CHECK(rel_diff(ir.lhs, rr.lhs) <= tol16(ctx));
    CHECK(rel_diff(ir.theta_main, rr.theta_main) <= tol16(ctx));
  }
}

TEST_CASE("theta cross-check is tiny for both scenario kinds") {
  PrecisionContext ctx(256);
  Scenario sr = scen_3_2(256, 2.0, 0.0);
  CHECK(theta_cross_check(sr, ctx) <= tol16(ctx));
  Scenario si(half_base(256), XComplex::one(256), IrrationalScale::surd(0, 1, 1, 2),
              XReal::from_double(0.3, 256));
  CHECK(theta_cross_check(si, ctx) <= tol16(ctx));
}

TEST_CASE("main term matches theta / pochhammer assembly") {
  PrecisionContext ctx(256);
  Scenario s = scen_3_2(256, 0.8, -0.4);
  XComplex main = rational_main_term(s, 7, ctx);
  const prec_t w = ctx.work_bits();
  PrecisionContext wctx(w);
  XReal qw = s.base().q.at_prec(w);
  XComplex uw = s.u().at_prec(w);
  XComplex x = ipow(uw, -1) * XComplex(pow_real(qw, s.lambda()));
  mpq_class e = mpq_class(49, 2) + mpq_class(7) * s.lambda();
  XComplex expect = ipow(uw, 7) * theta_product(x, s.base(), wctx) /
                    (pochhammer_infinite(XComplex(qw), s.base(), wctx) *
                     XComplex(pow_real(qw, e)));
  CHECK(rel_diff(main, expect.at_prec(256)) <= tol16(ctx));
}
