#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/parallel.hpp"
#include "qlab/dynamics/wave.hpp"
#include "qlab/estimators/exponents.hpp"
#include "qlab/geometry/quadrature.hpp"

namespace qlab {

struct StrichartzOptions {
  int panels = 0;  // Gauss panels on [0, 1]; 0 picks the smallest count passing the guard
  int order = 8;   // nodes per panel
  double p = 0.0;  // 0 means p_c
};

struct StrichartzRatio {
  double ratio = 0.0;
  double spacetime_norm = 0.0;
  double data_norm = 0.0;
  double p = 0.0;
  int time_nodes = 0;
};

/// ||u||_{L^p([0,1] x M)} / (||(I+P)^{1/2} f0||_2 + ||(I+P)^{-1/2} f1||_2) for
/// the wave solution with data (f0, f1) in eigen-coefficients.
inline StrichartzRatio strichartz_ratio(std::shared_ptr<const SpectralDecomposition> spec, const std::vector<double>& f0,
                                        const std::vector<double>& f1, const StrichartzOptions& opt = {}) {
  detail::require(f0.size() == spec->size() && f1.size() == spec->size(), ErrorKind::domain, "dynamics",
                  "strichartz: data size mismatch");
  const int n = spec->basis->manifold().n;
  StrichartzRatio out;
  out.p = opt.p > 0.0 ? opt.p : p_critical(n);
  double lmax = 0.0;
  for (std::size_t i = 0; i < spec->size(); ++i)
    if (f0[i] != 0.0 || f1[i] != 0.0) lmax = std::max(lmax, spec->lambda[i]);
  // at least 8 time nodes per period 2 pi / lmax
  const double needed = 8.0 * lmax / (2.0 * std::numbers::pi);
  const int order = std::max(2, opt.order);
  int panels = opt.panels;
  if (panels == 0) panels = std::max(2, static_cast<int>(std::ceil(needed / order)));
  if (panels * order < needed)
    detail::raise(ErrorKind::resolution, "dynamics",
                  "strichartz: time grid under-resolved (" + std::to_string(panels * order) + " nodes, need " +
                      std::to_string(static_cast<int>(std::ceil(needed))) + ")");
  Rule tr;
  append_composite(gauss_legendre(order), 0.0, 1.0, panels, tr.nodes, tr.weights);
  out.time_nodes = static_cast<int>(tr.size());

  WaveSolution w{spec, f0, f1};
  const auto& grid = spec->basis->grid();
  std::vector<double> slice(tr.size());
  parallel_for(tr.size(), [&](std::size_t k) {
    const auto u = spec->synthesize(std::span<const double>(w.at(tr.nodes[k])));
    slice[k] = std::pow(lp_norm(grid, u, out.p), out.p);
  });
  double s = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) s += tr.weights[k] * slice[k];
  out.spacetime_norm = std::pow(s, 1.0 / out.p);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < spec->size(); ++i) {
    a += (1.0 + spec->lambda[i]) * f0[i] * f0[i];
    b += f1[i] * f1[i] / (1.0 + spec->lambda[i]);
  }
  out.data_norm = std::sqrt(a) + std::sqrt(b);
  detail::require(out.data_norm > 0.0, ErrorKind::domain, "dynamics", "strichartz: zero data");
  out.ratio = out.spacetime_norm / out.data_norm;
  return out;
}

}  // namespace qlab
