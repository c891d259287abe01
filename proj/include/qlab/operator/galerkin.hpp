#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/matrix.hpp"
#include "qlab/core/parallel.hpp"
#include "qlab/geometry/basis.hpp"
#include "qlab/potentials/integrals.hpp"
#include "qlab/potentials/potential.hpp"

namespace qlab {

/// Matrix of the form q_V(e_j, e_k) + N delta_jk in a Laplace eigenbasis,
/// stored as one dense block per sector (zonal potentials never couple
/// different sectors).
struct GalerkinMatrix {
  std::shared_ptr<const Basis> basis;
  std::vector<Matrix<double>> blocks;  // blocks[s] indexed like basis->sectors()[s]
  double shift = 0.0;
  int level = 0;                       // pole grading level (0: Gauss grid)
  std::size_t quadrature_nodes = 0;

  std::size_t size() const { return basis->size(); }

  /// Dense copy of the whole matrix (for tests and small K).
  Matrix<double> dense() const {
    Matrix<double> a(size(), size());
    const auto& sec = basis->sectors();
    for (std::size_t s = 0; s < sec.size(); ++s)
      for (std::size_t i = 0; i < sec[s].size(); ++i)
        for (std::size_t j = 0; j < sec[s].size(); ++j) a(sec[s][i], sec[s][j]) = blocks[s](i, j);
    return a;
  }
};

struct AssemblyOptions {
  double shift = 0.0;
  int level = 5;                // grading level for singular potentials
  bool check_refinement = true; // compare against level + 2 for singular V
  double refinement_tol = 0.01;
};

namespace detail {

// Potential matrix elements <V f_j, f_k> over polar profiles, one block per
// distinct polar sector, on a grid chosen for V.
inline std::vector<Matrix<double>> potential_blocks(const Potential& V, const Basis& basis, int level,
                                                    std::size_t* nodes_used) {
  const int n = basis.manifold().n;
  const ZonalGrid g = make_zonal_grid(n, basis.K(), V.grid_options(level));
  if (nodes_used) *nodes_used = g.size();
  const std::size_t dim = basis.size();
  const std::size_t np = g.size();

  // weighted potential, computed in logs so graded weights never underflow
  std::vector<double> wv(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double v = V(g.nodes[i]);
    wv[i] = v == 0.0 ? 0.0 : std::copysign(std::exp(g.log_weights[i] + std::log(std::abs(v))), v);
  }
  Matrix<double> prof(dim, np);
  parallel_for(np, [&](std::size_t i) {
    const auto col = basis.profiles_at(g.nodes[i]);
    for (std::size_t j = 0; j < dim; ++j) prof(j, i) = col[j];
  });
  // pole caps below the graded segments
  std::vector<double> north(dim, 0.0), south(dim, 0.0);
  double tail_north = 0.0, tail_south = 0.0;
  for (const auto& sg : V.singularities) {
    const bool at_north = sg.location == 0.0;
    const double t = pole_tail(sg, n, 1.0, at_north ? g.eps_north : g.eps_south);
    if (!std::isfinite(t))
      raise(ErrorKind::numeric, "operator-core", "potential is not integrable at a pole; cannot assemble");
    (at_north ? tail_north : tail_south) += (sg.amplitude < 0 ? -t : t);
  }
  if (tail_north != 0.0) north = basis.profiles_at(g.probes[0]);
  if (tail_south != 0.0) south = basis.profiles_at(g.probes[1]);

  const auto& sectors = basis.sectors();
  std::vector<Matrix<double>> blocks(sectors.size());
  std::vector<int> same_as(sectors.size(), -1);
  if (basis.manifold().kind == ManifoldKind::sphere_full_2d)
    for (std::size_t s = 2; s < sectors.size(); s += 2) same_as[s] = static_cast<int>(s - 1);  // sin copies cos

  for (std::size_t s = 0; s < sectors.size(); ++s) {
    if (same_as[s] >= 0) continue;
    const auto& idx = sectors[s];
    const std::size_t m = idx.size();
    Matrix<double> b(m, m);
    parallel_for(m, [&](std::size_t a) {
      auto pa = prof.row(idx[a]);
      for (std::size_t c = a; c < m; ++c) {
        auto pc = prof.row(idx[c]);
        double acc = 0.0;
        for (std::size_t i = 0; i < np; ++i) acc += wv[i] * pa[i] * pc[i];
        acc += tail_north * north[idx[a]] * north[idx[c]] + tail_south * south[idx[a]] * south[idx[c]];
        b(a, c) = acc;
      }
    });
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < a; ++c) b(a, c) = b(c, a);
    blocks[s] = std::move(b);
  }
  for (std::size_t s = 0; s < sectors.size(); ++s)
    if (same_as[s] >= 0) blocks[s] = blocks[same_as[s]];
  return blocks;
}

}  // namespace detail

/// A_jk = lambda_j^2 delta_jk + <V e_j, e_k> + N delta_jk.
inline GalerkinMatrix assemble(const Potential& V, std::shared_ptr<const Basis> basis,
                               const AssemblyOptions& opt = {}) {
  GalerkinMatrix A;
  A.basis = basis;
  A.shift = opt.shift;
  const auto& sectors = basis->sectors();

  if (basis->manifold().kind == ManifoldKind::torus) {
    if (!V.constant)
      detail::raise(ErrorKind::config, "operator-core", "torus Galerkin matrices support constant potentials only");
    for (const auto& sec : sectors) {
      Matrix<double> b(1, 1);
      b(0, 0) = basis->mode(sec[0]).eigenvalue + *V.constant + opt.shift;
      A.blocks.push_back(b);
    }
    return A;
  }

  if (V.constant) {
    for (const auto& sec : sectors) {
      Matrix<double> b(sec.size(), sec.size());
      for (std::size_t i = 0; i < sec.size(); ++i) b(i, i) = basis->mode(sec[i]).eigenvalue + *V.constant + opt.shift;
      A.blocks.push_back(b);
    }
    return A;
  }

  A.level = V.needs_composite_grid() ? opt.level : 0;
  A.blocks = detail::potential_blocks(V, *basis, opt.level, &A.quadrature_nodes);

  if (V.is_singular() && opt.check_refinement) {
    const auto fine = detail::potential_blocks(V, *basis, opt.level + 2, nullptr);
    double scale = 0.0;
    for (const auto& b : A.blocks)
      for (double v : b.data()) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    std::size_t wj = 0, wk = 0;
    for (std::size_t s = 0; s < sectors.size(); ++s) {
      const auto& b = A.blocks[s];
      for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
          const double ref = std::max(std::abs(fine[s](i, j)), 1e-6 * scale);
          const double rel = std::abs(fine[s](i, j) - b(i, j)) / ref;
          if (rel > worst) {
            worst = rel;
            wj = sectors[s][i];
            wk = sectors[s][j];
          }
        }
    }
    if (worst > opt.refinement_tol)
      detail::raise(ErrorKind::numeric, "operator-core",
                    "singular matrix entries did not converge under refinement; worst entry (" +
                        std::to_string(wj) + "," + std::to_string(wk) + ") changed by " +
                        std::to_string(100.0 * worst) + "%");
  }

  for (std::size_t s = 0; s < sectors.size(); ++s)
    for (std::size_t i = 0; i < sectors[s].size(); ++i)
      A.blocks[s](i, i) += basis->mode(sectors[s][i]).eigenvalue + opt.shift;
  return A;
}

}  // namespace qlab
