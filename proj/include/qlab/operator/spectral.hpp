#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "qlab/core/eigen.hpp"
#include "qlab/core/parallel.hpp"
#include "qlab/geometry/grid_function.hpp"
#include "qlab/operator/galerkin.hpp"

namespace qlab {

/// Eigenpairs of a Galerkin matrix. Eigenvalues mu_i include the shift N
/// carried by the matrix; frequencies are lambda_i = sqrt(max(mu_i, 0)).
/// Eigenvector i lives in one sector: coef[i][a] multiplies the basis mode
/// basis->sectors()[sector[i]][a].
class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;

  std::shared_ptr<const Basis> basis;
  std::vector<double> mu;
  std::vector<double> lambda;
  std::vector<int> sector;
  std::vector<std::vector<double>> coef;
  double shift = 0.0;

  std::size_t size() const { return mu.size(); }
  double max_frequency() const { return lambda.empty() ? 0.0 : lambda.back(); }

  /// Coefficients of eigenvector i in the full basis.
  std::vector<double> dense_vector(std::size_t i) const {
    std::vector<double> v(basis->size(), 0.0);
    const auto& idx = basis->sectors()[sector[i]];
    for (std::size_t a = 0; a < idx.size(); ++a) v[idx[a]] = coef[i][a];
    return v;
  }

  /// Polar profile of eigenfunction i at a polar node (spheres).
  double profile_at(std::size_t i, const std::vector<double>& mode_profiles) const {
    const auto& idx = basis->sectors()[sector[i]];
    double s = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) s += coef[i][a] * mode_profiles[idx[a]];
    return s;
  }

  /// Polar profiles of all eigenfunctions on the basis polar nodes:
  /// row i, column = polar node.
  Matrix<double> polar_table() const {
    const auto& P = basis->profiles();
    Matrix<double> out(size(), P.cols());
    parallel_for(size(), [&](std::size_t i) {
      const auto& idx = basis->sectors()[sector[i]];
      auto row = out.row(i);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const double c = coef[i][a];
        if (c == 0.0) continue;
        auto pr = P.row(idx[a]);
        for (std::size_t k = 0; k < pr.size(); ++k) row[k] += c * pr[k];
      }
    });
    return out;
  }

  /// Eigenfunction i at the probe points (poles on spheres).
  std::vector<double> probe_values(std::size_t i) const {
    const auto& idx = basis->sectors()[sector[i]];
    const auto& P = basis->probe_profiles();
    std::vector<double> out(P.cols(), 0.0);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t k = 0; k < P.cols(); ++k) out[k] += coef[i][a] * P(idx[a], k);
    return out;
  }

  /// Eigenfunction i on every grid node.
  std::vector<double> values(std::size_t i) const {
    const auto& idx = basis->sectors()[sector[i]];
    std::vector<double> out(basis->grid().size(), 0.0);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const auto v = basis->values(idx[a]);
      for (std::size_t k = 0; k < v.size(); ++k) out[k] += coef[i][a] * v[k];
    }
    return out;
  }

  /// Eigenfunction i at an arbitrary point.
  double value_at(std::size_t i, const GridPoint& p) const {
    const auto& idx = basis->sectors()[sector[i]];
    double s = 0.0;
    if (basis->manifold().kind == ManifoldKind::torus) {
      for (std::size_t a = 0; a < idx.size(); ++a) s += coef[i][a] * basis->value(idx[a], p);
      return s;
    }
    const auto prof = basis->profiles_at(p.polar);
    for (std::size_t a = 0; a < idx.size(); ++a) s += coef[i][a] * prof[idx[a]] * basis->azimuthal(idx[a], p.azimuth);
    return s;
  }

  /// <f, v_i> for every eigenfunction, f sampled on the grid.
  std::vector<double> analyze(std::span<const double> f) const {
    const auto c = project(*basis, f);
    std::vector<double> a(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto& idx = basis->sectors()[sector[i]];
      for (std::size_t k = 0; k < idx.size(); ++k) a[i] += coef[i][k] * c[idx[k]];
    }
    return a;
  }

  /// Basis coefficients of sum_i a_i v_i.
  template <typename T>
  std::vector<T> to_basis(std::span<const T> a) const {
    std::vector<T> c(basis->size(), T{});
    for (std::size_t i = 0; i < size(); ++i) {
      if (a[i] == T{}) continue;
      const auto& idx = basis->sectors()[sector[i]];
      for (std::size_t k = 0; k < idx.size(); ++k) c[idx[k]] += a[i] * coef[i][k];
    }
    return c;
  }

  /// Grid values of sum_i a_i v_i.
  std::vector<double> synthesize(std::span<const double> a) const {
    const auto c = to_basis(a);
    return qlab::synthesize(*basis, c);
  }

  std::vector<std::complex<double>> synthesize(std::span<const std::complex<double>> a) const {
    std::vector<double> re(size()), im(size());
    for (std::size_t i = 0; i < size(); ++i) {
      re[i] = a[i].real();
      im[i] = a[i].imag();
    }
    const auto gr = synthesize(std::span<const double>(re));
    const auto gi = synthesize(std::span<const double>(im));
    std::vector<std::complex<double>> out(gr.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {gr[k], gi[k]};
    return out;
  }
};

/// v_i(x) for every eigenfunction at one point.
inline std::vector<double> eigenfunctions_at(const SpectralDecomposition& spec, const GridPoint& x) {
  const auto& b = *spec.basis;
  std::vector<double> mode_values(b.size());
  if (b.manifold().kind == ManifoldKind::torus) {
    for (std::size_t j = 0; j < b.size(); ++j) mode_values[j] = b.value(j, x);
  } else {
    const auto prof = b.profiles_at(x.polar);
    for (std::size_t j = 0; j < b.size(); ++j) mode_values[j] = prof[j] * b.azimuthal(j, x.azimuth);
  }
  std::vector<double> out(spec.size(), 0.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& idx = b.sectors()[spec.sector[i]];
    for (std::size_t a = 0; a < idx.size(); ++a) out[i] += spec.coef[i][a] * mode_values[idx[a]];
  }
  return out;
}

/// Symmetric eigendecomposition of every sector block, merged and sorted by
/// eigenvalue (ties keep sector order). Deterministic.
inline SpectralDecomposition diagonalize(const GalerkinMatrix& A) {
  const auto& sectors = A.basis->sectors();
  std::vector<SymmetricEigen> parts(sectors.size());
  const bool full = A.basis->manifold().kind == ManifoldKind::sphere_full_2d;
  parallel_for(sectors.size(), [&](std::size_t s) {
    if (full && s >= 2 && s % 2 == 0) return;  // sin sector equals the cos sector
    parts[s] = eigh(A.blocks[s]);
  });
  if (full)
    for (std::size_t s = 2; s < sectors.size(); s += 2) parts[s] = parts[s - 1];

  struct Entry {
    double mu;
    int sector;
    std::size_t col;
  };
  std::vector<Entry> all;
  for (std::size_t s = 0; s < sectors.size(); ++s)
    for (std::size_t c = 0; c < parts[s].values.size(); ++c) all.push_back({parts[s].values[c], static_cast<int>(s), c});
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.mu < b.mu; });

  SpectralDecomposition d;
  d.basis = A.basis;
  d.shift = A.shift;
  for (const auto& e : all) {
    d.mu.push_back(e.mu);
    d.lambda.push_back(std::sqrt(std::max(e.mu, 0.0)));
    d.sector.push_back(e.sector);
    d.coef.push_back(parts[e.sector].vectors.column(e.col));
  }
  return d;
}

}  // namespace qlab
