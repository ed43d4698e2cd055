// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "types.hpp"

namespace mmcell {

// Half-wavelength ULA response in the cosine domain: entry m = e^{-jπ m c}.
inline CVector steering_vector(int length, double cosine) {
  if (length < 1) throw std::invalid_argument("steering_vector: length must be >= 1");
  CVector a(length);
  for (int m = 0; m < length; ++m) a(m) = std::polar(1.0, -kPi * m * cosine);
  return a;
}

inline CVector ula_response(int length, double angle_rad) {
  if (!(angle_rad >= 0.0 && angle_rad <= kPi)) throw std::domain_error("ula_response: angle must lie in [0, pi]");
  return steering_vector(length, std::cos(angle_rad));
}

// Reduces x to (-1, 1]; every kernel below has period 2.
inline double wrap_period2(double x) { return x - 2.0 * std::round(x / 2.0); }

// D_n(x) = sum_{m<n} e^{jπ m x}, so that a_n(u)^H a_n(w) = D_n(u - w).
inline cd dirichlet_sum(int n, double x) {
  const double r = wrap_period2(x);
  const double den = std::sin(kPi * r / 2.0);
  if (den == 0.0) return {static_cast<double>(n), 0.0};
  const double ratio = std::sin(n * kPi * r / 2.0) / den;
  return std::polar(ratio, kPi * (n - 1) * r / 2.0);
}

}  // namespace mmcell
