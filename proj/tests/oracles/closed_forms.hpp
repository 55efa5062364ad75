#pragma once

// Test-side reference values, derived independently of the library code.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Band eigenvalue of the half-plane model with b1 + b2 = s, arctan form.
/// Only defined for s in (-2, 0).
inline std::optional<std::complex<double>> halfplane_arctan(double s) {
  if (!(s > -2.0 && s < 0.0)) return std::nullopt;
  return std::complex<double>(0.0, 2.0 / kPi * std::atan(std::sqrt(4.0 - s * s) / s));
}

/// Same eigenvalue, arccos form.
inline std::complex<double> halfplane_arccos(double s) {
  return {0.0, -2.0 / kPi * std::acos(-s / 2.0)};
}

/// 1 = no band eigenvalues, 2 = proper -i, 3 = improper.
inline int halfplane_case(double s) {
  if (s == 0.0) return 2;
  if (s <= -2.0 || s > 0.0) return 1;
  return 3;
}

/// Dyadic integral of r^-1 |d/dr r^{3/2}|^2 over [r_{m+1}, r_m].
inline double r32_level(double r_m) { return 2.25 * (r_m - r_m / 2.0); }

/// Dyadic integral of r^-1 |d/dr r^p|^2 = p^2 r^{2p-2} over [a, b].
inline double power_level(double p, double a, double b) {
  if (std::abs(2.0 * p - 2.0) < 1e-14) return p * p * std::log(b / a);
  return p * p * (std::pow(b, 2.0 * p - 2.0) - std::pow(a, 2.0 * p - 2.0)) / (2.0 * p - 2.0);
}

/// Squared W^2 seminorm of Re z^alpha over the half plane, r in [a, b].
/// |D^2 Re f|^2 = 2 |f''|^2 = 2 alpha^2 (alpha-1)^2 r^{2 alpha - 4}, independent of omega.
inline double harmonic_power_w2(double alpha, double a, double b) {
  const double c = 2.0 * alpha * alpha * (alpha - 1.0) * (alpha - 1.0);
  const double e = 2.0 * alpha - 2.0;  // exponent after the r dr measure
  return c * kPi * (std::pow(b, e) - std::pow(a, e)) / e;
}

}  // namespace oracle
