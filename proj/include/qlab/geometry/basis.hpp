#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/matrix.hpp"
#include "qlab/geometry/manifold.hpp"
#include "qlab/geometry/polynomials.hpp"
#include "qlab/geometry/quadrature.hpp"

namespace qlab {

/// A point of the model manifold. Spheres use the polar node and the azimuth
/// (S^2 only); tori use theta.
struct GridPoint {
  PolarNode polar;
  double azimuth = 0.0;
  std::array<double, 3> theta{};
};

/// Quadrature on the whole manifold. Spheres: polar grid (times a uniform
/// azimuth grid on full S^2, node index = polar * azimuth_count + a).
/// Torus: uniform grid, lexicographic in theta.
struct QuadratureGrid {
  ModelManifold manifold;
  ZonalGrid polar;
  int azimuth_count = 1;
  int torus_points = 0;
  std::vector<double> weights;
  std::vector<double> log_weights;

  std::size_t size() const { return weights.size(); }

  GridPoint point(std::size_t i) const {
    GridPoint p;
    if (manifold.kind == ManifoldKind::torus) {
      const double h = 2.0 * std::numbers::pi / torus_points;
      for (int d = manifold.n - 1; d >= 0; --d) {
        p.theta[d] = h * static_cast<double>(i % torus_points);
        i /= torus_points;
      }
      return p;
    }
    const std::size_t a = i % azimuth_count;
    p.polar = polar.nodes[i / azimuth_count];
    p.azimuth = 2.0 * std::numbers::pi * static_cast<double>(a) / azimuth_count;
    return p;
  }

  /// Zero-weight probe points (the poles on spheres; none on the torus).
  std::vector<GridPoint> probes() const {
    std::vector<GridPoint> out;
    if (manifold.is_sphere())
      for (const auto& pr : polar.probes) out.push_back(GridPoint{pr, 0.0, {}});
    return out;
  }
};

/// A Laplace eigenmode. On spheres degree = k with eigenvalue k(k+n-1); on
/// the torus degree = |m|^2. `sector` groups modes that a zonal potential
/// can couple (the azimuthal order and parity on S^2).
struct Mode {
  int degree = 0;
  int order = 0;
  int parity = 0;  // 0: cos / zonal, 1: sin
  int sector = 0;
  std::array<int, 3> lattice{};
  double eigenvalue = 0.0;
  double frequency = 0.0;
};

struct BasisOptions {
  ZonalGridOptions grid;
  int azimuth = 0;  // full S^2 azimuth points; 0 means 2K + 2
};

/// Truncated Laplace eigenbasis with its quadrature grid. Immutable.
///
/// On spheres every mode factors as e_j = f_j(phi) * h_j(azimuth) where the
/// polar profile f_j is orthonormal against the polar weights within its
/// sector and h_j has unit mean square (1, sqrt2 cos, sqrt2 sin).
class Basis {
 public:
  static Basis build(const ModelManifold& manifold, int K, const BasisOptions& opt = {}) {
    detail::require(K >= 0, ErrorKind::domain, "geometry-basis", "K must be >= 0");
    Basis b;
    b.manifold_ = manifold;
    b.K_ = K;
    b.grid_.manifold = manifold;
    if (manifold.kind == ManifoldKind::torus) {
      b.build_torus(K);
    } else {
      b.grid_.polar = make_zonal_grid(manifold.n, K, opt.grid);
      if (manifold.kind == ManifoldKind::sphere_zonal)
        b.build_zonal(K);
      else
        b.build_full(K, opt.azimuth > 0 ? opt.azimuth : 2 * K + 2);
    }
    return b;
  }

  const ModelManifold& manifold() const { return manifold_; }
  int K() const { return K_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<Mode>& modes() const { return modes_; }
  const Mode& mode(std::size_t j) const { return modes_[j]; }
  const QuadratureGrid& grid() const { return grid_; }
  const std::vector<std::vector<std::size_t>>& sectors() const { return sectors_; }
  double max_frequency() const { return modes_.empty() ? 0.0 : modes_.back().frequency; }

  /// Polar profiles on the polar nodes (spheres): row j holds f_j.
  const Matrix<double>& profiles() const { return profiles_; }
  /// Polar profiles at the probe nodes (poles).
  const Matrix<double>& probe_profiles() const { return probe_profiles_; }

  /// Azimuthal factor h_j.
  double azimuthal(std::size_t j, double az) const {
    const Mode& m = modes_[j];
    if (m.order == 0) return 1.0;
    return std::numbers::sqrt2 * (m.parity == 0 ? std::cos(m.order * az) : std::sin(m.order * az));
  }

  /// All polar profiles at an arbitrary polar node.
  std::vector<double> profiles_at(const PolarNode& p) const {
    std::vector<double> out(size(), 0.0);
    if (manifold_.kind == ManifoldKind::sphere_zonal) {
      ZonalPolynomials poly(manifold_.n, K_);
      poly.values(p.cos_phi, out.data());
      const double s = 1.0 / std::sqrt(sphere_volume(manifold_.n - 1));
      for (double& v : out) v *= s;
    } else if (manifold_.kind == ManifoldKind::sphere_full_2d) {
      std::vector<double> tmp(K_ + 1);
      const double s = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      for (int m = 0; m <= K_; ++m) {
        associated_legendre(m, K_, p.cos_phi, p.sin_phi, tmp.data());
        for (std::size_t j : order_index_[m]) out[j] = s * tmp[modes_[j].degree - m];
      }
    } else {
      detail::raise(ErrorKind::domain, "geometry-basis", "polar profiles undefined on the torus");
    }
    return out;
  }

  /// Value of mode j at an arbitrary point.
  double value(std::size_t j, const GridPoint& p) const {
    if (manifold_.kind == ManifoldKind::torus) return torus_value(j, p.theta);
    return profiles_at(p.polar)[j] * azimuthal(j, p.azimuth);
  }

  /// Mode j sampled on the grid nodes.
  std::vector<double> values(std::size_t j) const {
    std::vector<double> out(grid_.size());
    if (manifold_.kind == ManifoldKind::torus) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = torus_value(j, grid_.point(i).theta);
      return out;
    }
    const int M = grid_.azimuth_count;
    std::vector<double> h(M);
    for (int a = 0; a < M; ++a) h[a] = azimuthal(j, 2.0 * std::numbers::pi * a / M);
    auto row = profiles_.row(j);
    for (std::size_t i = 0; i < row.size(); ++i)
      for (int a = 0; a < M; ++a) out[i * M + a] = row[i] * h[a];
    return out;
  }

  /// Mode j at the probe points.
  std::vector<double> probe_values(std::size_t j) const {
    std::vector<double> out;
    if (manifold_.kind == ManifoldKind::torus) return out;
    for (std::size_t i = 0; i < probe_profiles_.cols(); ++i) out.push_back(probe_profiles_(j, i));
    return out;
  }

 private:
  void build_zonal(int K) {
    const int n = manifold_.n;
    for (int k = 0; k <= K; ++k) {
      Mode m;
      m.degree = k;
      m.eigenvalue = static_cast<double>(k) * (k + n - 1);
      m.frequency = std::sqrt(m.eigenvalue);
      modes_.push_back(m);
    }
    sectors_.assign(1, {});
    for (std::size_t j = 0; j < modes_.size(); ++j) sectors_[0].push_back(j);
    order_index_.assign(1, sectors_[0]);
    grid_.azimuth_count = 1;
    grid_.weights = grid_.polar.weights;
    grid_.log_weights = grid_.polar.log_weights;
    fill_profiles();
  }

  void build_full(int K, int azimuth) {
    if (azimuth < 2 * K + 1)
      detail::raise(ErrorKind::resolution, "geometry-basis",
                    "azimuth grid of " + std::to_string(azimuth) + " points cannot resolve K = " +
                        std::to_string(K) + "; need at least " + std::to_string(2 * K + 1));
    std::vector<std::tuple<int, int, int>> keys;  // (l, m, parity)
    for (int l = 0; l <= K; ++l)
      for (int m = 0; m <= l; ++m) {
        keys.emplace_back(l, m, 0);
        if (m > 0) keys.emplace_back(l, m, 1);
      }
    std::sort(keys.begin(), keys.end());
    order_index_.assign(K + 1, {});
    sectors_.assign(2 * K + 1, {});
    for (auto [l, m, par] : keys) {
      Mode md;
      md.degree = l;
      md.order = m;
      md.parity = par;
      md.sector = m == 0 ? 0 : 2 * m - 1 + par;
      md.eigenvalue = static_cast<double>(l) * (l + 1);
      md.frequency = std::sqrt(md.eigenvalue);
      const std::size_t j = modes_.size();
      modes_.push_back(md);
      sectors_[md.sector].push_back(j);
      order_index_[m].push_back(j);
    }
    grid_.azimuth_count = azimuth;
    const std::size_t np = grid_.polar.size();
    grid_.weights.resize(np * azimuth);
    grid_.log_weights.resize(np * azimuth);
    const double lm = std::log(static_cast<double>(azimuth));
    for (std::size_t i = 0; i < np; ++i)
      for (int a = 0; a < azimuth; ++a) {
        grid_.weights[i * azimuth + a] = grid_.polar.weights[i] / azimuth;
        grid_.log_weights[i * azimuth + a] = grid_.polar.log_weights[i] - lm;
      }
    fill_profiles();
  }

  void fill_profiles() {
    const auto& nodes = grid_.polar.nodes;
    profiles_ = Matrix<double>(size(), nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto col = profiles_at(nodes[i]);
      for (std::size_t j = 0; j < size(); ++j) profiles_(j, i) = col[j];
    }
    const auto& pr = grid_.polar.probes;
    probe_profiles_ = Matrix<double>(size(), pr.size());
    for (std::size_t i = 0; i < pr.size(); ++i) {
      const auto col = profiles_at(pr[i]);
      for (std::size_t j = 0; j < size(); ++j) probe_profiles_(j, i) = col[j];
    }
  }

  void build_torus(int K) {
    const int n = manifold_.n;
    std::vector<std::pair<std::array<int, 3>, int>> keys;
    const int r = K;
    std::array<int, 3> m{};
    auto first_positive = [&](const std::array<int, 3>& v) {
      for (int d = 0; d < n; ++d)
        if (v[d] != 0) return v[d] > 0;
      return false;
    };
    for (m[0] = -r; m[0] <= r; ++m[0])
      for (m[1] = -r; m[1] <= r; ++m[1])
        for (m[2] = (n == 3 ? -r : 0); m[2] <= (n == 3 ? r : 0); ++m[2]) {
          const int q = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
          if (q > K * K) continue;
          if (q == 0) {
            keys.push_back({m, 0});
          } else if (first_positive(m)) {
            keys.push_back({m, 0});
            keys.push_back({m, 1});
          }
        }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      const auto qa = a.first[0] * a.first[0] + a.first[1] * a.first[1] + a.first[2] * a.first[2];
      const auto qb = b.first[0] * b.first[0] + b.first[1] * b.first[1] + b.first[2] * b.first[2];
      return std::tie(qa, a.first, a.second) < std::tie(qb, b.first, b.second);
    });
    for (const auto& [lat, par] : keys) {
      Mode md;
      md.lattice = lat;
      md.parity = par;
      md.degree = lat[0] * lat[0] + lat[1] * lat[1] + lat[2] * lat[2];
      md.eigenvalue = md.degree;
      md.frequency = std::sqrt(md.eigenvalue);
      md.sector = static_cast<int>(modes_.size());
      sectors_.push_back({modes_.size()});
      modes_.push_back(md);
    }
    const int N = 2 * K + 2;
    grid_.torus_points = N;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= N;
    const double w = manifold_.volume() / static_cast<double>(total);
    grid_.weights.assign(total, w);
    grid_.log_weights.assign(total, std::log(w));
  }

  double torus_value(std::size_t j, const std::array<double, 3>& th) const {
    const Mode& md = modes_[j];
    const double inv = 1.0 / std::sqrt(manifold_.volume());
    if (md.degree == 0) return inv;
    double arg = 0.0;
    for (int d = 0; d < manifold_.n; ++d) arg += md.lattice[d] * th[d];
    return std::numbers::sqrt2 * inv * (md.parity == 0 ? std::cos(arg) : std::sin(arg));
  }

  ModelManifold manifold_;
  int K_ = 0;
  std::vector<Mode> modes_;
  std::vector<std::vector<std::size_t>> sectors_;
  std::vector<std::vector<std::size_t>> order_index_;  // spheres: modes by azimuthal order
  QuadratureGrid grid_;
  Matrix<double> profiles_;
  Matrix<double> probe_profiles_;
};

}  // namespace qlab
