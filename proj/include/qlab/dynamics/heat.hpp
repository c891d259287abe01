#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/operator/multiplier.hpp"

namespace qlab {

/// e^{-t H_V}: coefficients e^{-t mu_i} (mu_i includes the shift).
inline MultiplierOperator heat(std::shared_ptr<const SpectralDecomposition> spec, double t) {
  detail::require(t > 0.0, ErrorKind::domain, "dynamics", "heat needs t > 0");
  MultiplierOperator op{spec, std::vector<std::complex<double>>(spec->size()), "heat"};
  for (std::size_t i = 0; i < spec->size(); ++i) op.coef[i] = std::exp(-t * spec->mu[i]);
  return op;
}

/// Heat kernel on the diagonal, sum_i e^{-t mu_i} v_i(x)^2.
inline double heat_kernel_diagonal(const SpectralDecomposition& spec, double t, const GridPoint& x) {
  detail::require(t > 0.0, ErrorKind::domain, "dynamics", "heat needs t > 0");
  const auto v = eigenfunctions_at(spec, x);
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) s += std::exp(-t * spec.mu[i]) * v[i] * v[i];
  return s;
}

/// max |sum_i e^{-t mu_i} v_i(x) v_i(y)| over pairs from the probe points and
/// every stride-th grid node. On a zonal basis this is the kernel of the
/// rotation-invariant sector, which is the full kernel whenever one of the
/// points is a pole.
inline double heat_sup_kernel(const SpectralDecomposition& spec, double t, std::size_t stride = 16) {
  detail::require(t > 0.0, ErrorKind::domain, "dynamics", "heat needs t > 0");
  const auto& grid = spec.basis->grid();
  std::vector<GridPoint> pts = grid.probes();
  for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(stride, 1)) pts.push_back(grid.point(i));
  std::vector<std::vector<double>> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    v[k] = eigenfunctions_at(spec, pts[k]);
    for (std::size_t i = 0; i < spec.size(); ++i) v[k][i] *= std::exp(-0.5 * t * spec.mu[i]);
  });
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a; b < pts.size(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < spec.size(); ++i) s += v[a][i] * v[b][i];
      best = std::max(best, std::abs(s));
    }
  return best;
}

}  // namespace qlab
