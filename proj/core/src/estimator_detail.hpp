#pragma once

// Shared arithmetic between the sample-facing estimators and the
// theta-based g_map. Both express the same formulas; only the source of
// the CF moduli differs.

#include <algorithm>
#include <cmath>

#include "substable/char_fn.hpp"
#include "substable/estimators.hpp"

namespace substable::detail {

inline double clamp_alpha(double raw, bool* clamped) {
  if (raw < kAlphaMin) {
    if (clamped) *clamped = true;
    return kAlphaMin;
  }
  if (raw > kAlphaMax) {
    if (clamped) *clamped = true;
    return kAlphaMax;
  }
  return raw;
}

/// Two-point log-log inversion: log(log|phi(s1 t)| / log|phi(s2 t)|) / log(s1/s2),
/// from already-safe log moduli (both strictly negative).
inline double alpha_from_log_moduli(double log_mod_s1, double log_mod_s2,
                                    const FrequencyPair& fp, bool* clamped) {
  const double raw = std::log(log_mod_s1 / log_mod_s2) / std::log(fp.s1 / fp.s2);
  return clamp_alpha(raw, clamped);
}

inline double sigma_diag_from_log_modulus(double log_mod, double s, double alpha_hat) {
  return (2.0 / (s * s)) * std::pow(-log_mod, 2.0 / alpha_hat);
}

inline double sigma_offdiag_from_log_moduli(double log_mod_plus, double log_mod_minus,
                                            double alpha_hat) {
  return 0.5 * (std::pow(-log_mod_plus, 2.0 / alpha_hat) -
                std::pow(-log_mod_minus, 2.0 / alpha_hat));
}

}  // namespace substable::detail
