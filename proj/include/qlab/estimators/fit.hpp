#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qlab/core/error.hpp"

namespace qlab {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation in log space
  std::size_t points = 0;
};

/// Least-squares slope of log(value) against log(lambda).
inline SlopeFit fit_exponent(std::span<const double> lambda, std::span<const double> values) {
  detail::require(lambda.size() == values.size(), ErrorKind::domain, "estimators", "fit_exponent: size mismatch");
  detail::require(lambda.size() >= 4, ErrorKind::domain, "estimators", "fit_exponent needs at least 4 points");
  const std::size_t m = lambda.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(values[i] > 0.0) || !(lambda[i] > 0.0) || !std::isfinite(values[i]))
      detail::raise(ErrorKind::domain, "estimators", "fit_exponent needs positive finite values");
    x[i] = std::log(lambda[i]);
    y[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  detail::require(sxx > 0.0, ErrorKind::domain, "estimators", "fit_exponent needs distinct lambda values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / m);
  f.points = m;
  return f;
}

inline SlopeFit fit_exponent(const std::vector<double>& lambda, const std::vector<double>& values) {
  return fit_exponent(std::span<const double>(lambda), std::span<const double>(values));
}

/// lambda_0 * 2^(j/2) for j = 0.. while <= lambda_1 (within rounding).
inline std::vector<double> geometric_grid(double lambda0, double lambda1) {
  detail::require(lambda0 > 0.0 && lambda1 >= lambda0, ErrorKind::config, "estimators", "bad lambda range");
  std::vector<double> g;
  for (int j = 0;; ++j) {
    const double l = lambda0 * std::pow(2.0, 0.5 * j);
    if (l > lambda1 * (1.0 + 1e-12)) break;
    g.push_back(l);
  }
  return g;
}

}  // namespace qlab
