#include "qtheta/format.hpp"

#include <cmath>
#include <cstdlib>

namespace qtheta {

std::size_t digits_for_bits(prec_t bits) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(bits) * 0.30102999566398120)) + 2;
}

std::string to_scientific(const XReal& x, std::size_t digits) {
  if (x.is_nan()) return "nan";
  if (!x.is_finite()) return x.sign() < 0 ? "-inf" : "inf";
  if (digits == 0) digits = digits_for_bits(x.prec());
  if (digits < 2) digits = 2;

  if (x.is_zero()) {
    std::string s = "0.";
    s.append(digits - 1, '0');
    s += "e+00";
    return s;
  }

  mpfr_exp_t e10 = 0;
  char* raw = mpfr_get_str(nullptr, &e10, 10, digits, x.raw(), MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);

  std::string out;
  std::size_t first = 0;
  if (mant[0] == '-') {
    out += '-';
    first = 1;
  }
  out += mant[first];
  out += '.';
  out += mant.substr(first + 1);

  // mpfr_get_str normalizes as 0.ddd * 10^e10; printed exponent is e10 - 1.
  long pexp = static_cast<long>(e10) - 1;
  out += 'e';
  out += pexp < 0 ? '-' : '+';
  unsigned long mag = pexp < 0 ? -static_cast<unsigned long>(pexp) : static_cast<unsigned long>(pexp);
  std::string digits_str = std::to_string(mag);
  if (digits_str.size() < 2) digits_str.insert(0, "0");
  out += digits_str;
  return out;
}

XReal parse_real(const std::string& s, prec_t prec) {
  if (s.empty()) throw domain_error("parse_real: empty string");
  XReal r(prec);
  char* end = nullptr;
  mpfr_strtofr(r.raw(), s.c_str(), &end, 10, MPFR_RNDN);
  if (end != s.c_str() + s.size())
    throw domain_error("parse_real: invalid numeric literal '" + s + "'");
  return r;
}

}  // namespace qtheta
