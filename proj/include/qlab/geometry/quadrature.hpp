#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/core/eigen.hpp"
#include "qlab/core/error.hpp"
#include "qlab/geometry/manifold.hpp"

namespace qlab {

/// One-dimensional quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Recurrence coefficient beta_k (k >= 1) of the monic orthogonal polynomials
/// for the weight (1 - x^2)^a on [-1, 1].
inline double symmetric_jacobi_beta(int k, double a) {
  const double kk = k;
  return kk * (kk + 2.0 * a) / ((2.0 * kk + 2.0 * a - 1.0) * (2.0 * kk + 2.0 * a + 1.0));
}

/// Integral of (1 - x^2)^a over [-1, 1].
inline double symmetric_jacobi_mass(double a) {
  return std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
}

/// Gauss rule for the weight (1 - x^2)^a on [-1, 1] (a = 0 is Gauss-Legendre).
/// Golub-Welsch for the nodes, one Newton polish, Christoffel weights.
inline Rule gauss_jacobi_symmetric(int m, double a) {
  detail::require(m >= 1, ErrorKind::domain, "geometry-basis", "quadrature size must be >= 1");
  std::vector<double> diag(m, 0.0), off(m > 1 ? m - 1 : 0);
  std::vector<double> sb(m + 1, 0.0);
  for (int k = 1; k <= m; ++k) sb[k] = std::sqrt(symmetric_jacobi_beta(k, a));
  for (int k = 1; k < m; ++k) off[k - 1] = sb[k];
  Rule rule;
  std::vector<double> fsq;
  tridiagonal_first_components(diag, off, rule.nodes, fsq);

  const double p0 = 1.0 / std::sqrt(symmetric_jacobi_mass(a));
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = rule.nodes[i];
    for (int pass = 0; pass < 2; ++pass) {
      // orthonormal recurrence for p_m and p_m', accumulating sum p_k^2
      double pm1 = 0.0, p = p0, dpm1 = 0.0, dp = 0.0, sum = p0 * p0;
      for (int k = 0; k < m; ++k) {
        const double pn = (x * p - sb[k] * pm1) / sb[k + 1];
        const double dpn = (p + x * dp - sb[k] * dpm1) / sb[k + 1];
        pm1 = p;
        p = pn;
        dpm1 = dp;
        dp = dpn;
        if (k + 1 < m) sum += p * p;
      }
      if (pass == 0) {
        const double step = p / dp;
        if (std::isfinite(step) && std::abs(step) < 1e-8) x -= step;
      } else {
        rule.weights[i] = 1.0 / sum;
      }
    }
    rule.nodes[i] = x;
  }
  return rule;
}

inline Rule gauss_legendre(int m) { return gauss_jacobi_symmetric(m, 0.0); }

/// Gauss rule on (0, inf) for the weight u^alpha e^{-u}.
inline Rule gauss_laguerre(int m, double alpha) {
  detail::require(m >= 1 && alpha > -1.0, ErrorKind::domain, "geometry-basis",
                  "gauss_laguerre: need m >= 1 and alpha > -1");
  std::vector<double> diag(m), off(m > 1 ? m - 1 : 0);
  for (int k = 0; k < m; ++k) diag[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < m; ++k) off[k - 1] = std::sqrt(k * (k + alpha));
  Rule rule;
  std::vector<double> fsq;
  tridiagonal_first_components(diag, off, rule.nodes, fsq);
  const double mu0 = std::tgamma(alpha + 1.0);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) rule.weights[i] = mu0 * fsq[i];
  return rule;
}

/// Appends `panels` equal Gauss-Legendre panels on [a, b].
inline void append_composite(const Rule& base, double a, double b, int panels,
                             std::vector<double>& x, std::vector<double>& w) {
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < base.size(); ++i) {
      x.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      w.push_back(0.5 * h * base.weights[i]);
    }
  }
}

/// Composite Gauss-Legendre rule on [a, b] with panel width at most h_max.
inline Rule composite_rule(double a, double b, double h_max, int order = 20) {
  Rule r;
  if (!(b > a)) return r;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h_max - 1e-12)));
  append_composite(gauss_legendre(order), a, b, panels, r.nodes, r.weights);
  return r;
}

/// Node on the polar axis of S^n. `pole_distance` is min(phi, pi - phi)
/// computed without cancellation so singular evaluators stay accurate.
struct PolarNode {
  double phi = 0.0;
  double sin_phi = 0.0;
  double cos_phi = 1.0;
  double pole_distance = 0.0;

  static PolarNode from_phi(double phi) {
    const double t = std::min(phi, std::numbers::pi - phi);
    const double s = std::sin(t);
    const double c = phi <= 0.5 * std::numbers::pi ? std::cos(t) : -std::cos(t);
    return {phi, s, c, t};
  }
  /// Node at distance t from the south pole.
  static PolarNode near_south(double t) {
    return {std::numbers::pi - t, std::sin(t), -std::cos(t), t};
  }
};

struct ZonalGridOptions {
  bool graded = false;           // composite panels with graded pole segments
  int level = 5;                 // grading depth 2^level in s = ln(phi_c / phi)
  bool grade_north = true;
  bool grade_south = true;
  std::vector<double> breakpoints;
  int nodes = 0;                 // Gauss grid size; 0 means 2K + 16
};

/// Polar quadrature for integrals over S^n of zonal integrands. Weights carry
/// sin^{n-1}(phi) and vol(S^{n-1}) so that they sum to vol(S^n).
struct ZonalGrid {
  int n = 2;
  bool graded = false;
  int level = 0;
  std::vector<PolarNode> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;
  std::vector<PolarNode> probes;  // zero-weight points (the poles)
  double eps_north = 0.0;         // integration starts at phi = eps_north
  double eps_south = 0.0;         // and stops at pi - eps_south

  std::size_t size() const { return nodes.size(); }
};

inline int gauss_grid_size(int K) { return 2 * K + 16; }

inline double graded_depth(int level) { return std::ldexp(1.0, level); }

namespace detail {

inline void push_polar(ZonalGrid& g, const PolarNode& p, double log_w_phi) {
  // log of w_phi * sin^{n-1}(phi) * vol(S^{n-1})
  const double lw = log_w_phi + (g.n - 1) * std::log(p.sin_phi) + std::log(sphere_volume(g.n - 1));
  g.nodes.push_back(p);
  g.log_weights.push_back(lw);
  g.weights.push_back(std::exp(lw));
}

}  // namespace detail

inline ZonalGrid make_zonal_grid(int n, int K, const ZonalGridOptions& opt = {}) {
  detail::require(n >= 2, ErrorKind::domain, "geometry-basis", "dimension must be >= 2");
  detail::require(K >= 0, ErrorKind::domain, "geometry-basis", "K must be >= 0");
  const double pi = std::numbers::pi;
  ZonalGrid g;
  g.n = n;
  g.graded = opt.graded;
  g.probes = {PolarNode::from_phi(0.0), PolarNode{pi, 0.0, -1.0, 0.0}};

  if (!opt.graded) {
    const int m = opt.nodes > 0 ? opt.nodes : gauss_grid_size(K);
    if (m < gauss_grid_size(K))
      detail::raise(ErrorKind::resolution, "geometry-basis",
                    "grid of " + std::to_string(m) + " nodes cannot resolve K = " + std::to_string(K) +
                        "; need at least " + std::to_string(gauss_grid_size(K)) + " nodes");
    const double a = 0.5 * (n - 2);
    const Rule r = gauss_jacobi_symmetric(m, a);
    const double vol = sphere_volume(n - 1);
    // ascending phi means descending x
    for (int i = m - 1; i >= 0; --i) {
      const double x = r.nodes[i];
      const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
      const double phi = std::atan2(s, x);
      g.nodes.push_back({phi, s, x, std::min(phi, pi - phi)});
      g.weights.push_back(r.weights[i] * vol);
      g.log_weights.push_back(std::log(r.weights[i] * vol));
    }
    return g;
  }

  g.level = opt.level;
  double phi_c = std::min(0.5, 4.0 / (K + 1));
  for (double b : opt.breakpoints) phi_c = std::min(phi_c, 0.5 * std::min(b, pi - b));
  const double depth = graded_depth(opt.level);
  const Rule s_rule = gauss_legendre(16);
  const Rule panel = gauss_legendre(20);
  const double h_max = std::min(0.2, 6.0 / (K + 1));

  // north pole segment, phi = phi_c e^{-s}, s in [0, depth]; ascending phi
  double lo = 0.0;
  if (opt.grade_north) {
    std::vector<double> s, ws;
    append_composite(s_rule, 0.0, depth, static_cast<int>(depth), s, ws);
    for (std::size_t i = s.size(); i-- > 0;) {
      const double t = phi_c * std::exp(-s[i]);
      detail::push_polar(g, PolarNode::from_phi(t), std::log(ws[i]) + std::log(phi_c) - s[i]);
    }
    g.eps_north = phi_c * std::exp(-depth);
    lo = phi_c;
  }
  const double hi = opt.grade_south ? pi - phi_c : pi;

  std::vector<double> cuts{lo};
  std::vector<double> bps = opt.breakpoints;
  std::sort(bps.begin(), bps.end());
  for (double b : bps)
    if (b > lo + 1e-14 && b < hi - 1e-14) cuts.push_back(b);
  cuts.push_back(hi);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h_max - 1e-12)));
    std::vector<double> x, w;
    append_composite(panel, a, b, panels, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) detail::push_polar(g, PolarNode::from_phi(x[i]), std::log(w[i]));
  }

  if (opt.grade_south) {
    std::vector<double> s, ws;
    append_composite(s_rule, 0.0, depth, static_cast<int>(depth), s, ws);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double t = phi_c * std::exp(-s[i]);
      detail::push_polar(g, PolarNode::near_south(t), std::log(ws[i]) + std::log(phi_c) - s[i]);
    }
    g.eps_south = phi_c * std::exp(-depth);
  }
  return g;
}

}  // namespace qlab
