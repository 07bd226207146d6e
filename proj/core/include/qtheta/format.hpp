#pragma once

#include <cstddef>
#include <string>

#include "qtheta/xreal.hpp"

namespace qtheta {

/// Decimal digits that make the rendering of a P-bit value round-trip:
/// ceil(P * log10 2) + 2.
std::size_t digits_for_bits(prec_t bits);

/// Locale-free scientific rendering "d.ddd...e(+|-)EE" (minus sign for
/// negatives, exponent always signed, at least two exponent digits).
/// digits = 0 picks digits_for_bits(x.prec()).
std::string to_scientific(const XReal& x, std::size_t digits = 0);

/// Strict decimal/scientific parser; the whole string must be consumed.
XReal parse_real(const std::string& s, prec_t prec);

}  // namespace qtheta
