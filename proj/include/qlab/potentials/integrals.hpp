#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qlab/geometry/manifold.hpp"
#include "qlab/geometry/quadrature.hpp"
#include "qlab/potentials/potential.hpp"

namespace qlab {

/// Integral of |V|^q over the cap {dist to pole < eps} of S^n using the
/// annotated asymptotics V ~ A t^{-a} |ln(t/2)|^{-b}. In u = ln(2/t) this is
///   vol(S^{n-1}) |A|^q 2^e int_{u_eps}^inf e^{-e u} u^{-bq} du,  e = n - a q.
/// Returns +inf when the cap integral diverges.
inline double pole_tail(const PoleSingularity& s, int n, double q, double eps) {
  const double e = n - s.power * q;
  const double bq = s.log_power * q;
  const double u0 = std::log(2.0 / eps);
  const double scale = sphere_volume(n - 1) * std::pow(std::abs(s.amplitude), q);
  if (std::abs(e) < 1e-12) {
    if (bq <= 1.0) return std::numeric_limits<double>::infinity();
    return scale * std::pow(u0, 1.0 - bq) / (bq - 1.0);
  }
  if (e < 0.0) return std::numeric_limits<double>::infinity();
  // 2^e e^{-e u0} int_0^inf e^{-e v} (u0 + v)^{-bq} dv
  static const Rule lag = gauss_laguerre(40, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < lag.size(); ++i) sum += lag.weights[i] * std::pow(u0 + lag.nodes[i] / e, -bq);
  return scale * std::exp(e * std::log(2.0) - e * u0) * sum / e;
}

/// Integral of |V|^q over S^n on a graded grid, plus analytic pole tails where
/// they converge. `tails_finite` reports whether every tail was finite.
inline double lq_integral(const Potential& V, int n, double q, int level, int K_hint,
                          bool* tails_finite = nullptr) {
  ZonalGridOptions opt;
  opt.graded = true;
  opt.level = level;
  opt.breakpoints = V.breakpoints;
  const ZonalGrid g = make_zonal_grid(n, K_hint, opt);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = std::abs(V(g.nodes[i]));
    if (v > 0.0) s += std::exp(g.log_weights[i] + q * std::log(v));
  }
  bool finite = true;
  for (const auto& sg : V.singularities) {
    const double eps = sg.location == 0.0 ? g.eps_north : g.eps_south;
    const double t = pole_tail(sg, n, q, eps);
    if (std::isfinite(t))
      s += t;
    else
      finite = false;
  }
  if (tails_finite) *tails_finite = finite;
  return s;
}

/// Value of an integral measured on successively 4x deeper pole grading.
struct RefinedValue {
  double value = 0.0;          // finest level (+inf when divergent)
  double finest = 0.0;         // finest-level number even when divergent
  bool divergent = false;
  bool converged = false;      // finest two levels agree to rel_tol
  std::vector<double> levels;  // grading levels used
  std::vector<double> samples; // value at each level
};

/// Divergent: both refinements grow by more than `growth`. Converged: last two
/// samples agree to `rel_tol`.
inline RefinedValue classify_refinement(const std::vector<double>& levels, const std::vector<double>& samples,
                                        double growth = 0.10, double rel_tol = 0.01) {
  RefinedValue r;
  r.levels = levels;
  r.samples = samples;
  const std::size_t m = samples.size();
  r.finest = samples.back();
  bool grows = m >= 3;
  for (std::size_t i = 1; i < m; ++i)
    grows = grows && samples[i] > (1.0 + growth) * samples[i - 1];
  r.divergent = grows;
  const double a = samples[m - 2], b = samples[m - 1];
  r.converged = !grows && std::abs(b - a) <= rel_tol * std::max(std::abs(b), 1e-300);
  if (a == 0.0 && b == 0.0) r.converged = true;
  r.value = r.divergent ? std::numeric_limits<double>::infinity() : b;
  return r;
}

inline const std::vector<int>& refinement_levels() {
  static const std::vector<int> levels{3, 5, 7};
  return levels;
}

struct NormEstimate {
  double value = 0.0;   // +inf when divergent
  bool divergent = false;
  bool converged = false;
  RefinedValue integral;
};

/// ||V||_{L^q(S^n)} with divergence detection across refinements.
inline NormEstimate lq_norm(const Potential& V, int n, double q, int K_hint = 64) {
  detail::require(q >= 1.0, ErrorKind::domain, "potentials", "lq_norm needs q >= 1");
  if (V.constant) {
    NormEstimate e;
    e.value = std::abs(*V.constant) * std::pow(sphere_volume(n), 1.0 / q);
    e.converged = true;
    return e;
  }
  std::vector<double> lv, s;
  for (int level : refinement_levels()) {
    lv.push_back(level);
    s.push_back(lq_integral(V, n, q, level, K_hint));
  }
  NormEstimate e;
  e.integral = classify_refinement(lv, s);
  e.divergent = e.integral.divergent;
  e.converged = e.integral.converged;
  e.value = e.divergent ? std::numeric_limits<double>::infinity() : std::pow(e.integral.value, 1.0 / q);
  return e;
}

/// ||V||_{L^{n/2}}; for n = 2 this is the L^1 norm.
inline NormEstimate ln_half_norm(const Potential& V, int n) {
  detail::require(n >= 2, ErrorKind::domain, "potentials", "n must be >= 2");
  return lq_norm(V, n, std::max(1.0, 0.5 * n));
}

}  // namespace qlab
