#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qtheta/format.hpp"
#include "qtheta/qseries.hpp"

#include "testrng.hpp"

using namespace qtheta;

namespace {

QBase base_q(double q, prec_t bits) { return QBase(XReal::from_double(q, bits)); }

XComplex cx(double re, double im, prec_t bits) {
  return XComplex(XReal::from_double(re, bits), XReal::from_double(im, bits));
}

XReal tol_bits(long b) { return mul_2si(XReal::one(64), -b); }

}  // namespace

TEST_CASE("base validation") {
  CHECK_THROWS_AS(QBase(XReal::zero(64)), domain_error);
  CHECK_THROWS_AS(QBase(XReal::one(64)), domain_error);
  CHECK_THROWS_AS(QBase(XReal::from_double(-0.5, 64)), domain_error);
  CHECK_THROWS_AS(QBase(XReal::from_double(1.5, 64)), domain_error);
  CHECK_THROWS_AS(QBase(XReal(64)), domain_error);  // NaN
}

TEST_CASE("finite pochhammer basics") {
  QBase b = base_q(0.5, 128);
  XComplex a = cx(0.3, 0.1, 128);
  CHECK(pochhammer_finite(a, b, 0) == XComplex::one(128));
  CHECK(pochhammer_finite(a, b, 1) == XComplex::one(128) - a);
  // (0.25; 0.5)_{-1} = 1 / (1 - 0.25/0.5) = 2 exactly
  XComplex v = pochhammer_finite(cx(0.25, 0, 128), b, -1);
  CHECK(v.real() == XReal::from_si(2, 128));
  CHECK(v.imag().is_zero());
}

TEST_CASE("finite pochhammer pole at negative index") {
  QBase b = base_q(0.5, 128);
  // 1 - a q^{-1} = 0 at a = 0.5
  CHECK_THROWS_AS(pochhammer_finite(cx(0.5, 0, 128), b, -1), singularity_error);
}

TEST_CASE("pochhammer shift property") {
  PrecisionContext ctx(192);
  QBase b = base_q(0.7, 192);
  TestRng rng(0xabcd01);
  for (int i = 0; i < 20; ++i) {
    XComplex a = cx(rng.uniform(-2, 2), rng.uniform(-2, 2), 192);
    long n = rng.range(0, 6), m = rng.range(0, 6);
    XComplex lhs = pochhammer_finite(a, b, n + m);
    XComplex qn = XComplex(pow_real(b.q, n));
    XComplex rhs = pochhammer_finite(a, b, n) * pochhammer_finite(a * qn, b, m);
    CHECK(rel_diff(lhs, rhs) <= tol_bits(180));
  }
}

TEST_CASE("infinite pochhammer frozen values") {
  PrecisionContext ctx(256);
  QBase b(XReal::from_mpq(mpq_class(1, 2), 256));
  XComplex half(XReal::from_mpq(mpq_class(1, 2), 256));
  XComplex v = pochhammer_infinite(half, b, ctx);
  XReal expect = parse_real("0.2887880950866024212788997219292307800889", 256);
  CHECK(rel_diff(v.real(), expect) <= parse_real("1e-38", 64));
  CHECK(v.imag().is_zero());

  XComplex w = pochhammer_infinite(-half, b, ctx);
  XReal expect2 = parse_real("2.38423102903137172414989928868", 256);
  CHECK(rel_diff(w.real(), expect2) <= parse_real("1e-28", 64));
}

TEST_CASE("infinite pochhammer exact zero factor") {
  PrecisionContext ctx(128);
  QBase b(XReal::from_mpq(mpq_class(1, 2), 128));
  // 1 - 4 q^2 = 0
  XComplex v = pochhammer_infinite(XComplex(XReal::from_si(4, 128)), b, ctx);
  CHECK(v.is_zero());
}

TEST_CASE("infinite pochhammer splits multiplicatively") {
  PrecisionContext ctx(256);
  QBase b = base_q(0.6, 256);
  TestRng rng(0xabcd02);
  for (int i = 0; i < 10; ++i) {
    XComplex a = cx(rng.uniform(-3, 3), rng.uniform(-3, 3), 256);
    XComplex full = pochhammer_infinite(a, b, ctx);
    XComplex q5 = XComplex(pow_real(b.q, 5));
    XComplex split = pochhammer_finite(a, b, 5) * pochhammer_infinite(a * q5, b, ctx);
    CHECK(rel_diff(full, split) <= ctx.rel_tol() * XReal::from_si(16, 64));
  }
}

TEST_CASE("euler series equals the product") {
  PrecisionContext ctx(256);
  TestRng rng(0xabcd03);
  for (double qd : {0.1, 0.5, 0.9}) {
    QBase b = base_q(qd, 256);
    for (int i = 0; i < 12; ++i) {
      XComplex z = cx(rng.uniform(-3, 3), rng.uniform(-3, 3), 256);
      XComplex series = euler_qexp_series(z, b, ctx);
      XComplex product = pochhammer_infinite(z, b, ctx);
      CHECK(rel_diff(series, product) <= ctx.rel_tol() * XReal::from_si(16, 64));
    }
  }
}

TEST_CASE("q-binomial identity") {
  PrecisionContext ctx(256);
  TestRng rng(0xabcd04);
  for (double qd : {0.2, 0.5, 0.8}) {
    QBase b = base_q(qd, 256);
    for (int i = 0; i < 10; ++i) {
      double r = rng.uniform(0.05, 0.9);
      double th = rng.uniform(0, 6.28318530717958647692);
      XComplex z = cx(r * std::cos(th), r * std::sin(th), 256);
      XComplex a = cx(rng.uniform(-2, 2), rng.uniform(-2, 2), 256);
      XReal dev = qbinomial_check(a, z, b, ctx);
      CHECK(dev <= ctx.rel_tol() * XReal::from_si(8, 64));
    }
  }
}

TEST_CASE("q-binomial rejects |z| >= 1") {
  PrecisionContext ctx(128);
  QBase b = base_q(0.5, 128);
  CHECK_THROWS_AS(qbinomial_check(cx(0.5, 0, 128), cx(1.0, 0, 128), b, ctx), domain_error);
  CHECK_THROWS_AS(qbinomial_check(cx(0.5, 0, 128), cx(0.8, 0.8, 128), b, ctx), domain_error);
}

TEST_CASE("q to 1 limit probe") {
  PrecisionContext ctx(192);
  for (auto [re, im] : {std::pair{1.0, 0.0}, std::pair{3.0, 2.0}, std::pair{-2.0, 0.0}}) {
    XComplex z = cx(re, im, 192);
    XReal prev;
    for (int j = 1; j <= 5; ++j) {
      XReal qj = XReal::one(192) - pow_si(XReal::from_si(10, 192), -j);
      QLimitProbe p = q1_limit_probe(z, QBase(qj), ctx);
      CHECK(p.bound_ok);
      if (j > 1) CHECK(p.deviation < prev);
      prev = p.deviation;
    }
  }
}

TEST_CASE("probe value approaches exp(-z)") {
  PrecisionContext ctx(192);
  XComplex z = cx(1.0, 0.0, 192);
  XReal qj = XReal::one(192) - pow_si(XReal::from_si(10, 192), -6);
  QLimitProbe p = q1_limit_probe(z, QBase(qj), ctx);
  // deviation ~ |z|^2 (1-q)/2 e^{-Re z}: about 1.8e-7 here
  CHECK(p.deviation <= parse_real("1e-6", 64));
  CHECK(rel_diff(p.value, exp(-z)) <= parse_real("1e-6", 64));
}
