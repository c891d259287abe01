#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/parallel.hpp"
#include "qlab/geometry/quadrature.hpp"
#include "qlab/potentials/integrals.hpp"
#include "qlab/potentials/potential.hpp"

namespace qlab {

/// h_n(r) = |log r| for n = 2, r^{2-n} for n >= 3.
inline double kato_kernel(int n, double r) {
  return n == 2 ? std::abs(std::log(r)) : std::pow(r, 2.0 - n);
}

struct KatoValue {
  double value = 0.0;   // +inf when divergent
  double finest = 0.0;  // largest finite-resolution value over centers
  bool divergent = false;
  bool converged = true;
  double argmax_phi = 0.0;
};

namespace detail {

// Ball integral centred at a pole, phi_center in {0, pi}, at grading level.
inline double kato_pole_integral(const Potential& V, int n, double r, bool south, int level) {
  const double depth = graded_depth(level);
  const Rule s_rule = gauss_legendre(16);
  std::vector<double> s, w;
  append_composite(s_rule, 0.0, depth, static_cast<int>(depth), s, w);
  const double lvol = std::log(sphere_volume(n - 1));
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rho = r * std::exp(-s[i]);  // d rho = rho ds
    const PolarNode p = south ? PolarNode::near_south(rho) : PolarNode::from_phi(rho);
    const double v = std::abs(V(p));
    if (v == 0.0) continue;
    const double lw = std::log(w[i]) + std::log(rho) + (n - 1) * std::log(std::sin(rho)) + lvol;
    sum += std::exp(lw + std::log(kato_kernel(n, rho)) + std::log(v));
  }
  return sum;
}

// Ball integral about a non-polar centre in geodesic polar coordinates
// (rho, alpha), with cos phi_y = cos phi0 cos rho + sin phi0 sin rho cos alpha.
// Panels are split where the ball meets a breakpoint circle phi = b so that
// each panel sees a smooth integrand.
inline double kato_ball_integral(const Potential& V, int n, double r, double phi0, int m) {
  const Rule gl = gauss_legendre(m);
  const double c0 = std::cos(phi0), s0 = std::sin(phi0);
  const double pi = std::numbers::pi;
  const double area = sphere_volume(n - 2);
  std::vector<double> marks = V.breakpoints;
  for (const auto& sg : V.singularities) marks.push_back(sg.location);

  std::vector<double> rho_cuts{0.0, r};
  for (double bp : marks) {
    for (double d : {std::abs(phi0 - bp), std::min(phi0 + bp, 2 * pi - phi0 - bp)})
      if (d > 0.0 && d < r) rho_cuts.push_back(d);
  }
  std::sort(rho_cuts.begin(), rho_cuts.end());

  auto inner = [&](double rho) {
    std::vector<double> cuts{0.0, pi};
    for (double bp : marks) {
      const double den = s0 * std::sin(rho);
      if (den <= 0.0) continue;
      const double ca = (std::cos(bp) - c0 * std::cos(rho)) / den;
      if (ca > -1.0 && ca < 1.0) cuts.push_back(std::acos(ca));
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      if (b - a <= 0.0) continue;
      for (std::size_t j = 0; j < gl.size(); ++j) {
        const double alpha = a + 0.5 * (b - a) * (gl.nodes[j] + 1.0);
        const double cy = std::clamp(c0 * std::cos(rho) + s0 * std::sin(rho) * std::cos(alpha), -1.0, 1.0);
        const PolarNode p = PolarNode::from_phi(std::acos(cy));
        if (!(p.sin_phi > 0.0)) continue;
        acc += 0.5 * (b - a) * gl.weights[j] * std::pow(std::sin(alpha), n - 2) * std::abs(V(p));
      }
    }
    return area * acc;
  };

  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < rho_cuts.size(); ++k) {
    const double a = rho_cuts[k], b = rho_cuts[k + 1];
    if (b - a <= 0.0) continue;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      double rho, w;
      if (k == 0) {  // rho = b t^2 flattens the kernel singularity at 0
        const double t = 0.5 * (gl.nodes[i] + 1.0);
        rho = b * t * t;
        w = 0.5 * gl.weights[i] * 2.0 * b * t;
      } else {
        rho = a + 0.5 * (b - a) * (gl.nodes[i] + 1.0);
        w = 0.5 * (b - a) * gl.weights[i];
      }
      sum += w * kato_kernel(n, rho) * std::pow(std::sin(rho), n - 1) * inner(rho);
    }
  }
  return sum;
}

}  // namespace detail

/// sup over centres of the h_n-weighted ball integral of |V| (geodesic balls
/// of radius r). Centres: both poles and `centers` uniformly spaced polar
/// angles. Pole centres use graded radial quadrature with refinement-based
/// divergence detection; other centres double the tensor rule until 1%.
inline KatoValue kato_modulus_detail(const Potential& V, double r, int n, int centers = 64) {
  detail::require(n >= 2, ErrorKind::domain, "potentials", "n must be >= 2");
  detail::require(r > 0.0 && r < 0.5 * std::numbers::pi, ErrorKind::domain, "potentials",
                  "kato radius must lie in (0, pi/2), got " + std::to_string(r));
  KatoValue out;
  if (V.is_zero()) return out;

  for (int pole = 0; pole < 2; ++pole) {
    std::vector<double> lv, s;
    for (int level : refinement_levels()) {
      lv.push_back(level);
      s.push_back(detail::kato_pole_integral(V, n, r, pole == 1, level));
    }
    const RefinedValue rv = classify_refinement(lv, s);
    if (rv.divergent) out.divergent = true;
    if (!rv.divergent && !rv.converged) out.converged = false;
    if (rv.finest > out.finest) {
      out.finest = rv.finest;
      out.argmax_phi = pole == 1 ? std::numbers::pi : 0.0;
    }
  }

  std::vector<double> vals(centers, 0.0);
  std::vector<char> ok(centers, 1);
  parallel_for(static_cast<std::size_t>(centers), [&](std::size_t c) {
    const double phi0 = (c + 0.5) * std::numbers::pi / centers;
    double prev = detail::kato_ball_integral(V, n, r, phi0, 12);
    for (int m = 24; m <= 96; m *= 2) {
      const double cur = detail::kato_ball_integral(V, n, r, phi0, m);
      const bool same = std::abs(cur - prev) <= 0.01 * std::max(std::abs(cur), 1e-300);
      prev = cur;
      if (same) {
        vals[c] = cur;
        return;
      }
    }
    vals[c] = prev;
    ok[c] = 0;
  });
  for (int c = 0; c < centers; ++c) {
    if (!ok[c]) out.converged = false;
    if (vals[c] > out.finest) {
      out.finest = vals[c];
      out.argmax_phi = (c + 0.5) * std::numbers::pi / centers;
    }
  }
  out.value = out.divergent ? std::numeric_limits<double>::infinity() : out.finest;
  return out;
}

/// Kato modulus m(r); +inf when the supremum diverges under refinement.
inline double kato_modulus(const Potential& V, double r, int n) { return kato_modulus_detail(V, r, n).value; }

struct KatoThresholds {
  double vanish_ratio = 0.1;    // in-Kato: m(r_min) <= vanish_ratio * m(r_max)
  double stagnate_ratio = 0.3;  // not-in-Kato: last 3 radii all above this ratio
};

enum class KatoVerdict { in_kato, not_in_kato, inconclusive };

inline const char* to_string(KatoVerdict v) {
  switch (v) {
    case KatoVerdict::in_kato: return "in-Kato";
    case KatoVerdict::not_in_kato: return "not-in-Kato";
    case KatoVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct KatoReport {
  int n = 2;
  std::vector<double> radii;     // decreasing
  std::vector<KatoValue> values;
  double ratio = 0.0;            // finite-resolution m(r_min) / m(r_max)
  KatoVerdict verdict = KatoVerdict::inconclusive;
  KatoThresholds thresholds;
  NormEstimate ln_half;
  int shift = -1;                // positivity shift, when computed
};

/// Geometric radii from r_max down to r_min with ratio 1/sqrt(10).
inline std::vector<double> kato_radii(double r_max = 1e-1, double r_min = 1e-3) {
  std::vector<double> r;
  for (double x = r_max; x >= r_min * (1 - 1e-9); x /= std::sqrt(10.0)) r.push_back(x);
  return r;
}

inline KatoVerdict kato_verdict(const std::vector<KatoValue>& v, const KatoThresholds& th, double* ratio_out = nullptr) {
  const double top = v.front().finest;
  const double ratio = top > 0.0 ? v.back().finest / top : 0.0;
  if (ratio_out) *ratio_out = ratio;
  for (const auto& x : v)
    if (x.divergent) return KatoVerdict::not_in_kato;
  if (top == 0.0) return KatoVerdict::in_kato;
  bool stagnates = v.size() >= 3;
  for (std::size_t i = v.size() >= 3 ? v.size() - 3 : 0; i < v.size(); ++i)
    stagnates = stagnates && v[i].finest / top > th.stagnate_ratio;
  bool converged = true;
  for (const auto& x : v) converged = converged && x.converged;
  if (stagnates) return KatoVerdict::not_in_kato;
  if (converged && ratio <= th.vanish_ratio) return KatoVerdict::in_kato;
  return KatoVerdict::inconclusive;
}

inline KatoReport kato_report(const Potential& V, int n, const std::vector<double>& radii = kato_radii(),
                              const KatoThresholds& th = {}) {
  KatoReport rep;
  rep.n = n;
  rep.radii = radii;
  rep.thresholds = th;
  for (double r : radii) rep.values.push_back(kato_modulus_detail(V, r, n));
  rep.verdict = kato_verdict(rep.values, th, &rep.ratio);
  rep.ln_half = ln_half_norm(V, n);
  return rep;
}

}  // namespace qlab
