#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qtheta/format.hpp"
#include "qtheta/xcomplex.hpp"
#include "qtheta/xreal.hpp"

#include "testrng.hpp"

using namespace qtheta;

TEST_CASE("construction and precision") {
  XReal x(128);
  CHECK(x.is_nan());
  CHECK(x.prec() == 128);
  XReal one = XReal::one(64);
  CHECK(one.to_double() == 1.0);
  CHECK(one.at_prec(256).prec() == 256);
  CHECK(XReal::from_si(-7, 64).to_si() == -7);
  CHECK(XReal::from_double(0.375, 64).to_double() == 0.375);
}

TEST_CASE("binary operations take max precision") {
  XReal a = XReal::one(64);
  XReal b = XReal::one(200);
  CHECK((a + b).prec() == 200);
  CHECK((a * b).prec() == 200);
  CHECK((a / b).prec() == 200);
}

TEST_CASE("dyadic round trip through mpq") {
  mpq_class three_eighths(3, 8);
  XReal x = XReal::from_mpq(three_eighths, 64);
  CHECK(x.to_mpq_exact() == three_eighths);
  // 1/3 is not dyadic; the rounded value still round-trips exactly
  XReal y = XReal::from_mpq(mpq_class(1, 3), 64);
  CHECK(XReal::from_mpq(y.to_mpq_exact(), 64) == y);
}

TEST_CASE("exponent range far beyond hardware floats") {
  XReal huge = mul_2si(XReal::one(64), 1L << 40);
  CHECK(huge.is_finite());
  CHECK(huge.exponent() == (1L << 40) + 1);
  XReal tiny = mul_2si(XReal::one(64), -(1L << 40));
  CHECK(tiny.is_finite());
  CHECK((huge * tiny) == XReal::one(64));
  // squaring still in range
  CHECK((huge * huge).is_finite());
}

TEST_CASE("pow_real rational exponents") {
  XReal q = XReal::from_mpq(mpq_class(1, 2), 256);
  XReal ulp = mul_2si(XReal::one(64), -253);
  CHECK(pow_real(q, mpq_class(2)) == q * q);  // both correctly rounded
  CHECK(rel_diff(pow_real(q, mpq_class(1, 2)), sqrt(q)) <= ulp);
  CHECK(rel_diff(pow_real(q, mpq_class(-3, 2)), XReal::one(256) / sqrt(q * q * q)) <= ulp);
  // general exponent: (q^{1/3})^3 ~ q
  XReal c = pow_real(q, mpq_class(1, 3));
  CHECK(rel_diff(c * c * c, q) <= mul_2si(XReal::one(64), -240));
  // huge exponent: (1/2)^{-2^20} = 2^{2^20}
  XReal h = pow_real(q, mpq_class(-(1L << 20)));
  CHECK(h.exponent() == (1L << 20) + 1);
}

TEST_CASE("pow_real with XReal exponent matches rational route") {
  XReal q = XReal::from_mpq(mpq_class(3, 10), 256);
  mpq_class e(7, 4);
  XReal via_q = pow_real(q, e);
  XReal via_x = pow_real(q, XReal::from_mpq(e, 256));
  CHECK(rel_diff(via_q, via_x) <= mul_2si(XReal::one(64), -240));
}

TEST_CASE("rel_diff") {
  XReal one = XReal::one(128);
  CHECK(rel_diff(one, one).is_zero());
  CHECK(rel_diff(XReal::zero(64), XReal::zero(64)).is_zero());
  XReal eps = mul_2si(one, -100);
  XReal d = rel_diff(one, one + eps);
  CHECK(d > mul_2si(one, -101));
  CHECK(d < mul_2si(one, -99));
}

TEST_CASE("precision context policy") {
  PrecisionContext ctx(256);
  CHECK(ctx.bits() == 256);
  CHECK(ctx.work_bits() == 256 + PrecisionContext::kGuardBits);
  CHECK(ctx.rel_tol() == mul_2si(XReal::one(64), -(256 - 16)));
  CHECK(ctx.escalated().bits() == 512);
  CHECK_THROWS_AS(PrecisionContext(1), domain_error);
}

TEST_CASE("complex arithmetic") {
  PrecisionContext ctx(128);
  XComplex u(XReal::from_double(1.5, 128), XReal::from_double(-0.25, 128));
  XComplex v(XReal::from_double(0.75, 128), XReal::from_double(2.0, 128));
  XComplex w = (u * v) / v;
  CHECK(rel_diff(w, u) <= mul_2si(XReal::one(64), -120));
  CHECK((u - u).is_zero());
  CHECK(u.conj().imag() == -u.imag());
  // |z| <= mag1(z) <= sqrt(2) |z|
  XReal a = u.abs();
  XReal m = u.mag1();
  CHECK(a <= m);
  CHECK(m * m <= XReal::from_si(2, 128) * a * a + mul_2si(XReal::one(64), -100));
}

TEST_CASE("integer powers of complex values") {
  XComplex u(XReal::from_double(0.5, 128), XReal::from_double(1.25, 128));
  CHECK(ipow(u, 0) == XComplex::one(128));
  CHECK(ipow(u, 1) == u);
  CHECK(rel_diff(ipow(u, 3), u * u * u) <= mul_2si(XReal::one(64), -120));
  CHECK(rel_diff(ipow(u, -2), XComplex::one(128) / (u * u)) <= mul_2si(XReal::one(64), -120));
  CHECK_THROWS_AS(ipow(XComplex::zero(64), -1), domain_error);
  // huge power stays finite thanks to the extended exponent range
  XComplex big = ipow(XComplex(XReal::from_si(2, 64)), 100000);
  CHECK(big.is_finite());
  CHECK(big.real().exponent() == 100001);
}

TEST_CASE("complex exp agrees with real exp on the real line") {
  PrecisionContext ctx(192);
  XReal x = XReal::from_double(-2.375, 192);
  XComplex e = exp(XComplex(x));
  CHECK(rel_diff(e.real(), exp(x)) <= mul_2si(XReal::one(64), -180));
  CHECK(e.imag().is_zero());
}

TEST_CASE("scientific rendering") {
  CHECK(digits_for_bits(64) == 22);
  CHECK(digits_for_bits(256) == 80);
  XReal x = XReal::from_double(1500.0, 64);
  std::string s = to_scientific(x, 6);
  CHECK(s == "1.50000e+03");
  CHECK(to_scientific(XReal::from_double(-0.0625, 64), 3) == "-6.25e-02");
  CHECK(to_scientific(XReal::zero(64), 4) == "0.000e+00");
}

TEST_CASE("strict parsing") {
  XReal x = parse_real("1.5e3", 64);
  CHECK(x.to_double() == 1500.0);
  CHECK(parse_real("-0.25", 64).to_double() == -0.25);
  CHECK_THROWS_AS(parse_real("1.5x", 64), domain_error);
  CHECK_THROWS_AS(parse_real("", 64), domain_error);
  CHECK_THROWS_AS(parse_real("twelve", 64), domain_error);
}

TEST_CASE("render/parse round trip at full precision") {
  TestRng rng(0x51a9);
  for (int i = 0; i < 50; ++i) {
    XReal x = XReal::from_double(rng.uniform(-1e6, 1e6), 192);
    XReal back = parse_real(to_scientific(x, digits_for_bits(192)), 192);
    CHECK(rel_diff(x, back) <= mul_2si(XReal::one(64), -183));
  }
}

TEST_CASE("error hierarchy") {
  CHECK_THROWS_AS(throw domain_error("x"), error);
  CHECK_THROWS_AS(throw singularity_error("x"), error);
  CHECK_THROWS_AS(throw precision_error("x"), error);
  CHECK_THROWS_AS(throw insufficient_data_error("x"), error);
}
