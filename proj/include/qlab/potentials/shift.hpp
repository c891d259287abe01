#pragma once

#include <cmath>
#include <memory>

#include "qlab/operator/galerkin.hpp"
#include "qlab/operator/spectral.hpp"

namespace qlab {

/// Smallest integer N >= 0 with lowest Galerkin eigenvalue of H_{V+N} >= 1.
inline int positivity_shift(const Potential& V, std::shared_ptr<const Basis> basis) {
  AssemblyOptions opt;
  opt.shift = 0.0;
  const auto d = diagonalize(assemble(V, basis, opt));
  const double mu_min = d.mu.front();
  return static_cast<int>(std::max(0.0, std::ceil(1.0 - mu_min - 1e-9)));
}

}  // namespace qlab
