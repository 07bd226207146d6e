#pragma once

#include <stdexcept>

namespace qtheta {

// Base of the library's error hierarchy.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument or malformed scenario (q outside (0,1), |z| >= 1, bad target).
struct domain_error : error {
  using error::error;
};

// An exact pole was hit, e.g. a vanishing factor in a negative-index product.
struct singularity_error : error {
  using error::error;
};

// The requested result cannot be certified at the current precision.
// Callers may retry once at doubled precision (see with_escalation).
struct precision_error : error {
  using error::error;
};

// Not enough input rows to form the requested statistic.
struct insufficient_data_error : error {
  using error::error;
};

}  // namespace qtheta
