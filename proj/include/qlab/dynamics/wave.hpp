#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/operator/multiplier.hpp"

namespace qlab {

/// cos(t P_V).
inline MultiplierOperator wave_cosine(std::shared_ptr<const SpectralDecomposition> spec, double t) {
  detail::require(std::abs(t) <= 0.5 * std::numbers::pi, ErrorKind::domain, "dynamics", "wave_cosine needs |t| <= pi/2");
  return multiplier(spec, [t](double l) { return std::cos(t * l); }, "cos(tP)");
}

/// sin(t P_V) / P_V, equal to t on zero modes.
inline MultiplierOperator wave_sine(std::shared_ptr<const SpectralDecomposition> spec, double t) {
  return multiplier(spec, [t](double l) { return l == 0.0 ? t : std::sin(t * l) / l; }, "sin(tP)/P");
}

/// u(t) = cos(tP) f0 + sin(tP)/P f1 in eigen-coefficients.
struct WaveSolution {
  std::shared_ptr<const SpectralDecomposition> spec;
  std::vector<double> f0;
  std::vector<double> f1;

  std::vector<double> at(double t) const {
    std::vector<double> u(f0.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double l = spec->lambda[i];
      u[i] = std::cos(t * l) * f0[i] + (l == 0.0 ? t : std::sin(t * l) / l) * f1[i];
    }
    return u;
  }

  std::vector<double> velocity(double t) const {
    std::vector<double> v(f0.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double l = spec->lambda[i];
      v[i] = -l * std::sin(t * l) * f0[i] + std::cos(t * l) * f1[i];
    }
    return v;
  }

  /// ||P u||^2 + ||u_t||^2.
  double energy(double t) const {
    const auto u = at(t);
    const auto v = velocity(t);
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) e += spec->lambda[i] * spec->lambda[i] * u[i] * u[i] + v[i] * v[i];
    return e;
  }
};

struct ConeLeakage {
  double leakage = 0.0;  // worst over the probe points
  double cutoff = 0.0;   // Lambda
  double margin = 0.0;
  double mass = 0.0;
};

/// Fraction of the L^2 mass of x -> [cos(tP) e^{-(P/Lambda)^2}](x, y) lying
/// outside d(x, y) <= |t| + margin, for y at each probe point (the poles).
/// Lambda defaults to lambda_max / 4 and margin to 4 / Lambda.
inline ConeLeakage cone_leakage(const SpectralDecomposition& spec, double t, double cutoff = 0.0) {
  detail::require(spec.basis->manifold().is_sphere(), ErrorKind::domain, "dynamics", "cone_leakage needs a sphere");
  detail::require(std::abs(t) <= 0.5 * std::numbers::pi, ErrorKind::domain, "dynamics", "cone_leakage needs |t| <= pi/2");
  const double lmax = spec.basis->max_frequency();
  ConeLeakage out;
  out.cutoff = cutoff > 0.0 ? cutoff : 0.25 * lmax;
  detail::require(out.cutoff > 0.0, ErrorKind::resolution, "dynamics", "cone_leakage: truncation has no frequencies");
  out.margin = 4.0 / out.cutoff;
  if (std::exp(-std::pow(lmax / out.cutoff, 2)) > 1e-6)
    detail::raise(ErrorKind::resolution, "dynamics",
                  "cone_leakage: truncation too small for mollifier scale " + std::to_string(out.cutoff) +
                      " (need lambda_max >= " + std::to_string(3.72 * out.cutoff) + ")");
  if (std::abs(t) + out.margin >= std::numbers::pi)
    detail::raise(ErrorKind::resolution, "dynamics", "cone_leakage: cone plus margin covers the whole sphere");
  if (t == 0.0) return out;

  const auto& grid = spec.basis->grid();
  const auto probes = grid.probes();
  for (std::size_t y = 0; y < probes.size(); ++y) {
    std::vector<double> kernel(grid.size(), 0.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double vy = spec.probe_values(i)[y];
      if (vy == 0.0) continue;
      const double c = std::cos(t * spec.lambda[i]) * std::exp(-std::pow(spec.lambda[i] / out.cutoff, 2)) * vy;
      const auto v = spec.values(i);
      for (std::size_t x = 0; x < v.size(); ++x) kernel[x] += c * v[x];
    }
    double total = 0.0, outside = 0.0;
    for (std::size_t x = 0; x < grid.size(); ++x) {
      const auto p = grid.point(x);
      const double d = y == 0 ? p.polar.phi : std::numbers::pi - p.polar.phi;
      const double m = grid.weights[x] * kernel[x] * kernel[x];
      total += m;
      if (d > std::abs(t) + out.margin) outside += m;
    }
    out.mass = std::max(out.mass, total);
    if (total > 0.0) out.leakage = std::max(out.leakage, outside / total);
  }
  return out;
}

}  // namespace qlab
