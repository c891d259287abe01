#pragma once

#include <cmath>

namespace qlab {

/// exp(-1/t) for t > 0, 0 otherwise. C-infinity, flat at 0.
inline double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// Smooth nonincreasing step: 1 on r <= 1/2, 0 on r >= 1.
inline double smooth_step(double r) {
  const double s = 2.0 * r - 1.0;
  const double a = flat_exp(1.0 - s);
  const double b = flat_exp(s);
  return a / (a + b);
}

/// Dyadic partition of unity built from smooth_step.
/// beta(0, xi) = smooth_step(xi); beta(j, xi) = beta1(xi / 2^(j-1)) for j >= 1,
/// where beta1(xi) = smooth_step(xi/2) - smooth_step(xi) is supported in [1/2, 2].
struct LittlewoodPaley {
  static double beta1(double xi) { return smooth_step(0.5 * xi) - smooth_step(xi); }

  static double beta(int j, double xi) {
    if (j == 0) return smooth_step(xi);
    return beta1(std::ldexp(xi, -(j - 1)));
  }

  /// Smallest J with beta(j, xi) == 0 for all j > J and every xi <= xi_max.
  static int levels_for(double xi_max) {
    int j = 0;
    while (std::ldexp(1.0, j) < xi_max) ++j;
    return j + 1;
  }
};

}  // namespace qlab
