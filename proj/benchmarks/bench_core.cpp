// Microbenchmarks for the hot evaluators. The precision argument sweeps the
// working precision in bits; chebyshev sweeps the scan length.

#include <benchmark/benchmark.h>

#include "qtheta/dioph.hpp"
#include "qtheta/laplace.hpp"
#include "qtheta/qseries.hpp"
#include "qtheta/theta.hpp"

using namespace qtheta;

namespace {

QBase make_base(prec_t bits) { return QBase(XReal::from_double(0.6, bits)); }

void bm_pochhammer_infinite(benchmark::State& state) {
  const prec_t bits = static_cast<prec_t>(state.range(0));
  PrecisionContext ctx(bits);
  QBase base = make_base(bits);
  XComplex a(XReal::from_double(1.3, bits), XReal::from_double(-0.7, bits));
  for (auto _ : state) benchmark::DoNotOptimize(pochhammer_infinite(a, base, ctx));
}

void bm_theta_product(benchmark::State& state) {
  const prec_t bits = static_cast<prec_t>(state.range(0));
  PrecisionContext ctx(bits);
  QBase base = make_base(bits);
  XComplex z(XReal::from_double(0.8, bits), XReal::from_double(0.4, bits));
  for (auto _ : state) benchmark::DoNotOptimize(theta_product(z, base, ctx));
}

void bm_theta_series(benchmark::State& state) {
  const prec_t bits = static_cast<prec_t>(state.range(0));
  PrecisionContext ctx(bits);
  QBase base = make_base(bits);
  XComplex z(XReal::from_double(0.8, bits), XReal::from_double(0.4, bits));
  for (auto _ : state) benchmark::DoNotOptimize(theta_series(z, base, ctx));
}

void bm_lhs_series(benchmark::State& state) {
  const prec_t bits = static_cast<prec_t>(state.range(0));
  PrecisionContext ctx(bits);
  Scenario s(make_base(bits), XComplex::one(bits), RationalScale(mpz_class(3), mpz_class(2)),
             mpq_class(1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(lhs_series(s, 15, ctx));
}

void bm_rational_residual(benchmark::State& state) {
  const prec_t bits = static_cast<prec_t>(state.range(0));
  PrecisionContext ctx(bits);
  Scenario s(make_base(bits), XComplex::one(bits), RationalScale(mpz_class(3), mpz_class(2)),
             mpq_class(1, 2));
  auto hits = rational_hits(s.rational_scale(), s.lambda(), 1, 15, bits);
  for (auto _ : state) benchmark::DoNotOptimize(rational_residual(s, hits[0], ctx));
}

void bm_chebyshev_hits(benchmark::State& state) {
  const std::int64_t n_max = state.range(0);
  IrrationalScale t = IrrationalScale::surd(0, 1, 1, 2);
  XReal beta = XReal::from_double(0.3, 128);
  for (auto _ : state) benchmark::DoNotOptimize(chebyshev_hits(t, beta, n_max));
  state.SetItemsProcessed(state.iterations() * n_max);
}

}  // namespace

BENCHMARK(bm_pochhammer_infinite)->Arg(128)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bm_theta_product)->Arg(128)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bm_theta_series)->Arg(128)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bm_lhs_series)->Arg(256)->Arg(512);
BENCHMARK(bm_rational_residual)->Arg(256)->Arg(512);
BENCHMARK(bm_chebyshev_hits)->Arg(1000)->Arg(5000);

BENCHMARK_MAIN();
