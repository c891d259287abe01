#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qlab/core/dual.hpp"
#include "qlab/core/error.hpp"
#include "qlab/geometry/quadrature.hpp"
#include "qlab/potentials/expression.hpp"

namespace qlab {

/// Local blow-up of a zonal potential at a pole:
///   V ~ amplitude * t^{-power} * |ln(t/2)|^{-log_power},  t = distance to the pole.
struct PoleSingularity {
  double location = 0.0;  // 0 (north) or pi (south)
  double amplitude = 0.0;
  double power = 0.0;
  double log_power = 0.0;
};

/// Real potential. On spheres it is zonal (a function of the polar angle);
/// on the torus only constants are supported.
struct Potential {
  std::string label;
  std::function<double(const PolarNode&)> eval;
  std::optional<double> constant;
  std::vector<PoleSingularity> singularities;
  std::vector<double> breakpoints;  // interior phi where V is not smooth

  double operator()(const PolarNode& p) const { return eval(p); }
  double at(double phi) const { return eval(PolarNode::from_phi(phi)); }

  bool is_singular() const { return !singularities.empty(); }
  bool is_zero() const { return constant && *constant == 0.0; }
  /// Smooth potentials integrate exactly enough on the Gauss grid.
  bool needs_composite_grid() const { return is_singular() || !breakpoints.empty(); }

  bool singular_at(double pole) const {
    for (const auto& s : singularities)
      if (s.location == pole) return true;
    return false;
  }

  ZonalGridOptions grid_options(int level = 5) const {
    ZonalGridOptions o;
    if (!needs_composite_grid()) return o;
    o.graded = true;
    o.level = level;
    o.breakpoints = breakpoints;
    return o;
  }

  /// V + c, keeping the annotations.
  Potential plus(double c) const {
    Potential p = *this;
    auto base = eval;
    p.eval = [base, c](const PolarNode& x) { return base(x) + c; };
    if (constant) p.constant = *constant + c;
    p.label = label + " + " + std::to_string(c);
    return p;
  }

  static Potential constant_value(double c) {
    Potential p;
    p.label = "constant(" + std::to_string(c) + ")";
    p.eval = [c](const PolarNode&) { return c; };
    p.constant = c;
    return p;
  }

  static Potential zero() { return constant_value(0.0); }

  static Potential expression(const std::string& text) {
    const Expression e = Expression::parse(text);
    if (!e.depends_on_phi()) {
      Potential p = constant_value(e(0.0));
      p.label = text;
      return p;
    }
    Potential p;
    p.label = text;
    p.eval = [e](const PolarNode& x) { return e(x.phi); };
    return p;
  }
};

namespace detail {
inline void require_interior(const PolarNode& p, const char* what) {
  if (!(p.sin_phi > 0.0))
    raise(ErrorKind::singular_point, "potentials",
          std::string(what) + " is singular at phi = " + std::to_string(p.phi));
}
}  // namespace detail

/// The explicit zonal potential on S^n with the unbounded eigenfunction below.
///   n >= 3: ((n-2) cos^2 - sin^2) / (sin^2 ln(sin/2))
///   n = 2 : 2 (cos^2 - sin^2 ln(sin/2)) / (sin^2 ln(sin/2)^2)
inline double counterexample_potential(int n, const PolarNode& p) {
  detail::require(n >= 2, ErrorKind::domain, "potentials", "counterexample needs n >= 2");
  detail::require_interior(p, "counterexample potential");
  const double s2 = p.sin_phi * p.sin_phi;
  const double c2 = p.cos_phi * p.cos_phi;
  const double L = std::log(0.5 * p.sin_phi);
  if (n == 2) return 2.0 * (c2 - s2 * L) / (s2 * L * L);
  return ((n - 2) * c2 - s2) / (s2 * L);
}

inline double counterexample_potential(int n, double phi) {
  return counterexample_potential(n, PolarNode::from_phi(phi));
}

/// f = -ln(sin/2) for n >= 3, f = ln(sin/2)^2 for n = 2; H_V f = 0.
inline double counterexample_eigenfunction(int n, const PolarNode& p) {
  detail::require_interior(p, "counterexample eigenfunction");
  const double L = std::log(0.5 * p.sin_phi);
  return n == 2 ? L * L : -L;
}

inline double counterexample_eigenfunction(int n, double phi) {
  return counterexample_eigenfunction(n, PolarNode::from_phi(phi));
}

struct ResidualSample {
  double f = 0.0;
  double laplacian = 0.0;  // Delta_g f
  double potential = 0.0;
  double residual = 0.0;   // (-Delta_g + V) f
};

/// (-Delta + V) f for the counterexample pair, with f', f'' from forward-mode
/// differentiation and Delta f = f'' + (n-1) cot(t) f'. The pair is symmetric
/// under phi -> pi - phi, so t is the distance to the nearer pole.
inline ResidualSample counterexample_residual(int n, const PolarNode& p) {
  detail::require_interior(p, "counterexample residual");
  const double t = p.pole_distance;
  const Dual2 x = Dual2::variable(t);
  const Dual2 L = log(0.5 * sin(x));
  const Dual2 f = n == 2 ? L * L : -L;
  ResidualSample r;
  r.f = f.v;
  r.laplacian = f.dd + (n - 1) * std::cos(t) / std::sin(t) * f.d;
  r.potential = counterexample_potential(n, p);
  r.residual = -r.laplacian + r.potential * r.f;
  return r;
}

inline ResidualSample counterexample_residual(int n, double phi) {
  return counterexample_residual(n, PolarNode::from_phi(phi));
}

inline std::vector<PoleSingularity> counterexample_singularities(int n) {
  const double A = n == 2 ? 2.0 : -(n - 2.0);
  const double b = n == 2 ? 2.0 : 1.0;
  return {{0.0, A, 2.0, b}, {std::numbers::pi, A, 2.0, b}};
}

namespace potentials {

inline Potential counterexample(int n) {
  Potential p;
  p.label = "counterexample(n=" + std::to_string(n) + ")";
  p.eval = [n](const PolarNode& x) { return counterexample_potential(n, x); };
  p.singularities = counterexample_singularities(n);
  return p;
}

/// Counterexample with both pole neighbourhoods {dist to pole <= cut} removed.
/// Bounded, hence in the Kato class.
inline Potential counterexample_cut(int n, double cut) {
  detail::require(cut > 0.0 && cut < 0.5 * std::numbers::pi, ErrorKind::config, "potentials",
                  "cut must lie in (0, pi/2)");
  Potential p;
  p.label = "counterexample-cut(n=" + std::to_string(n) + ", " + std::to_string(cut) + ")";
  p.eval = [n, cut](const PolarNode& x) {
    return x.pole_distance > cut ? counterexample_potential(n, x) : 0.0;
  };
  p.breakpoints = {cut, std::numbers::pi - cut};
  return p;
}

}  // namespace potentials

/// Potential from its textual form: "counterexample", "counterexample-cut:<r>",
/// or an expression in phi (a bare number is a constant).
inline Potential parse_potential(const std::string& text, int n) {
  if (text == "counterexample") return potentials::counterexample(n);
  const std::string cut = "counterexample-cut";
  if (text.rfind(cut, 0) == 0) {
    double r = 0.3;
    if (text.size() > cut.size()) {
      if (text[cut.size()] != ':')
        detail::raise(ErrorKind::config, "potentials", "expected counterexample-cut:<radius>");
      try {
        r = std::stod(text.substr(cut.size() + 1));
      } catch (...) {
        detail::raise(ErrorKind::config, "potentials", "bad cut radius in '" + text + "'");
      }
    }
    return potentials::counterexample_cut(n, r);
  }
  return Potential::expression(text);
}

}  // namespace qlab
