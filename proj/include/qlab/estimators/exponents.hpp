#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qlab/core/error.hpp"

namespace qlab {

/// p_c = 2(n+1)/(n-1).
inline double p_critical(int n) {
  detail::require(n >= 2, ErrorKind::domain, "estimators", "p_critical needs n >= 2");
  return 2.0 * (n + 1) / (n - 1);
}

/// Eigenfunction growth exponent: the larger of n(1/2-1/p)-1/2 and
/// (n-1)/2 (1/2-1/p). p may be +infinity.
inline double sigma(double p, int n) {
  detail::require(n >= 2, ErrorKind::domain, "estimators", "sigma needs n >= 2");
  detail::require(p >= 2.0, ErrorKind::domain, "estimators", "sigma needs p >= 2");
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double high = n * (0.5 - ip) - 0.5;
  const double low = 0.5 * (n - 1) * (0.5 - ip);
  return std::max(high, low);
}

/// Bochner-Riesz critical index max(n|1/2 - 1/p| - 1/2, 0), p in [1, inf].
inline double br_delta(double p, int n) {
  detail::require(p >= 1.0, ErrorKind::domain, "estimators", "br_delta needs p >= 1");
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  return std::max(n * std::abs(0.5 - ip) - 0.5, 0.0);
}

/// Dual pair (p, p') with 1/p - 1/p' = 2/n and 1/p + 1/p' = 1, i.e.
/// p = 2n/(n+2), p' = 2n/(n-2). Needs n >= 3.
struct ResolventPair {
  double p;
  double p_dual;
};

inline ResolventPair resolvent_pair(int n) {
  detail::require(n >= 3, ErrorKind::config, "estimators", "resolvent exponent pair needs n >= 3");
  return {2.0 * n / (n + 2), 2.0 * n / (n - 2)};
}

struct ExponentTable {
  int n = 2;
  std::vector<double> p;
  std::vector<double> sigma;
  double p_c = 0.0;
  std::vector<double> delta;
};

inline ExponentTable exponent_table(int n, const std::vector<double>& ps) {
  ExponentTable t;
  t.n = n;
  t.p = ps;
  t.p_c = p_critical(n);
  for (double p : ps) {
    t.sigma.push_back(sigma(p, n));
    t.delta.push_back(br_delta(p, n));
  }
  return t;
}

}  // namespace qlab
