#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtheta/xreal.hpp"

namespace qtheta {

/// Positive rational scale t = p/r in lowest terms.
class RationalScale {
 public:
  RationalScale(mpz_class p, mpz_class r);
  explicit RationalScale(const mpq_class& t);

  const mpz_class& p() const { return p_; }
  const mpz_class& r() const { return r_; }
  mpq_class value() const { return detail_value_; }

 private:
  mpz_class p_;
  mpz_class r_;
  mpq_class detail_value_;
};

/// Positive irrational scale, either an exact quadratic surd (a + b sqrt(d))/c
/// or a high-precision decimal literal. Surds evaluate to any precision;
/// a literal certifies only the bits its digits carry.
class IrrationalScale {
 public:
  static IrrationalScale surd(long a, long b, long c, long d);
  static IrrationalScale literal(const std::string& decimal);

  bool is_surd() const { return is_surd_; }
  /// Bits of precision the descriptor can certify (~3.32 per decimal digit
  /// for literals; effectively unbounded for surds).
  prec_t bits_available() const;
  /// Value at `prec` bits; throws precision_error when the descriptor is too
  /// short to certify that many bits.
  XReal value(prec_t prec) const;

  // Surd parameters; pre: is_surd().
  long a() const { return a_; }
  long b() const { return b_; }
  long c() const { return c_; }
  long d() const { return d_; }
  const std::string& literal_text() const { return literal_; }

 private:
  IrrationalScale() = default;
  bool is_surd_ = false;
  long a_ = 0, b_ = 0, c_ = 1, d_ = 0;
  std::string literal_;
};

/// One row of the theorem's quantifier: n*t = m + beta + gamma_n with
/// |gamma_n| <= 3/n; m is the nearest integer to n*t - beta, and
/// floor_matches records whether m == floor(n*t) (it usually does for n
/// large, but is not assumed).
struct DiophantineHit {
  std::int64_t n = 0;
  std::int64_t m = 0;
  XReal gamma;
  XReal beta;
  bool floor_matches = false;
};

/// S(t) = { {n p / r} : n in N } = { j/r : 0 <= j < r }, sorted ascending.
std::vector<mpq_class> fractional_parts(const RationalScale& t);

/// First `count` integers n >= n_min with {n p/r} = lambda, paired with
/// m = floor(n t); gamma_n = 0 exactly. lambda must lie in S(t).
std::vector<DiophantineHit> rational_hits(const RationalScale& t, const mpq_class& lambda,
                                          std::size_t count, std::int64_t n_min, prec_t prec);

struct CfExpansion {
  std::vector<mpz_class> quotients;
  std::vector<mpq_class> convergents;  // p_k / q_k
};

/// Continued fraction of t to `depth` partial quotients. Surd descriptors use
/// the exact integer recurrence; literals walk the Euclid map on the exact
/// decimal value and stop with a precision error once q_k^2 exceeds what the
/// digits certify.
CfExpansion cf_expansion(const IrrationalScale& t, std::size_t depth);

/// All n <= n_max whose nearest-integer distance gamma_n from n*t - beta
/// satisfies |gamma_n| <= 3/n (and whose m is non-negative), sorted by n.
/// The descriptor must certify about log2(n_max) + 40 bits.
std::vector<DiophantineHit> chebyshev_hits(const IrrationalScale& t, const XReal& beta,
                                           std::int64_t n_max);

/// The `count` hits with smallest n*|gamma_n| (ties to smaller n), returned
/// in ascending-n order.
std::vector<DiophantineHit> best_hits(const std::vector<DiophantineHit>& hits, std::size_t count);

}  // namespace qtheta
