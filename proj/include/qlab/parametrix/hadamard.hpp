#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/estimators/fit.hpp"
#include "qlab/geometry/manifold.hpp"
#include "qlab/parametrix/bessel.hpp"
#include "qlab/report/report.hpp"

namespace qlab {

/// Flat-space radial kernel
///   F_nu(r) = c_nu r^{-n/2+nu+1} z^{n/4-(nu+1)/2} K_{n/2-nu-1}(sqrt(z) r),
///   z = -(lambda+i)^2, Re sqrt(z) > 0, c_nu = 2^{-nu} (2 pi)^{-n/2},
/// i.e. nu! (2 pi)^{-n} times the Fourier integral of (|xi|^2 - (lambda+i)^2)^{-nu-1}.
/// For n = 3, nu = 0 this is e^{i(lambda+i) r} / (4 pi r).
struct HadamardKernel {
  int n = 3;
  int nu = 0;
  double lambda = 1.0;
  cplx z;
  cplx sqrt_z;

  HadamardKernel(int n_, int nu_, double lambda_) : n(n_), nu(nu_), lambda(lambda_) {
    detail::require(n >= 2, ErrorKind::domain, "parametrix", "hadamard kernel needs n >= 2");
    detail::require(nu >= 0 && nu <= 16, ErrorKind::domain, "parametrix", "hadamard kernel needs 0 <= nu <= 16");
    detail::require(lambda >= 1.0, ErrorKind::domain, "parametrix", "hadamard kernel needs lambda >= 1");
    const cplx k(lambda, 1.0);
    z = -k * k;
    sqrt_z = cplx(1.0, -lambda);  // = -i (lambda + i), the root with positive real part
  }

  double order() const { return 0.5 * n - nu - 1.0; }

  static double c_nu(int n, int nu) { return std::ldexp(1.0, -nu) * std::pow(2.0 * std::numbers::pi, -0.5 * n); }

  cplx operator()(double r) const {
    detail::require(r > 0.0, ErrorKind::domain, "parametrix", "hadamard kernel needs r > 0");
    const double m = order();
    return c_nu(n, nu) * std::pow(r, -m) * std::pow(sqrt_z, m) * bessel_k(m, sqrt_z * r);
  }
};

inline cplx f_nu(int n, int nu, double r, double lambda) { return HadamardKernel(n, nu, lambda)(r); }

/// (r, lambda, Re F, Im F, |F|) table for plotting.
inline ExperimentReport kernel_table(int n, int nu, const std::vector<double>& rs, const std::vector<double>& lambdas) {
  ExperimentReport rep;
  rep.experiment = "parametrix-table";
  rep.columns = {"r", "lambda", "re", "im", "abs"};
  for (double lambda : lambdas) {
    const HadamardKernel F(n, nu, lambda);
    for (double r : rs) {
      const cplx v = F(r);
      rep.add_row({r, lambda, v.real(), v.imag(), std::abs(v)});
    }
  }
  return rep;
}

struct RegimeSlopes {
  double near = 0.0;  ///< d log|F| / d log r on r in [1e-3/lambda, 1/lambda]
  double far = 0.0;   ///< d log|F| / d log lambda at fixed r
};

/// Local slopes of |F_nu| in the two regimes r <= 1/lambda and r >= 1/lambda.
/// Expected 2 - n and (n - 3)/2.
inline RegimeSlopes regime_slopes(int n, int nu, double lambda, const std::vector<double>& far_lambdas, double r_far) {
  const HadamardKernel F(n, nu, lambda);
  std::vector<double> rs, near;
  for (int k = 0; k <= 12; ++k) {
    rs.push_back(std::pow(10.0, -3.0 + 0.25 * k) / lambda);
    near.push_back(std::abs(F(rs.back())));
  }
  std::vector<double> far;
  for (double l : far_lambdas) far.push_back(std::abs(HadamardKernel(n, nu, l)(r_far)));
  return {fit_exponent(rs, near).slope, fit_exponent(far_lambdas, far).slope};
}

namespace detail {

// int |F_0(r)|^6 r dr over lambda r in [e^{y0}, e^{y1}], n = 2, in the
// variable y = log(lambda r).
inline double l6_radial(const HadamardKernel& F, double y0, double y1) {
  static const Rule base = gauss_legendre(16);
  if (!(y1 > y0)) return 0.0;
  const int panels = static_cast<int>(std::ceil((y1 - y0) / 0.25));
  const double h = (y1 - y0) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double r = std::exp(y0 + h * (p + 0.5 * (base.nodes[i] + 1.0))) / F.lambda;
      s += 0.5 * h * base.weights[i] * std::pow(std::abs(F(r)), 6) * r * r;
    }
  return s;
}

}  // namespace detail

/// sup_y (int |T_lambda(x, y)|^6 dx)^{1/6} on the disc of radius delta in
/// dimension 2, with T_lambda the flat kernel F_0. Expected ~ lambda^{-1/3}.
inline ExperimentReport kernel_l6_check(const std::vector<double>& lambdas, double delta = 0.5,
                                        double tolerance = 0.05, double residual_cap = 0.05) {
  detail::require(lambdas.size() >= 4, ErrorKind::config, "parametrix", "kernel_l6_check needs at least 4 lambdas");
  detail::require(delta > 0.0 && delta <= 1.0, ErrorKind::config, "parametrix", "kernel_l6_check needs 0 < delta <= 1");
  ExperimentReport rep;
  rep.experiment = "parametrix";
  rep.columns = {"lambda", "l6_norm", "l6_norm_2delta", "core_fraction", "scaled"};
  std::vector<double> norms;
  double last_change = 0.0;
  for (double lambda : lambdas) {
    const HadamardKernel F(2, 0, lambda);
    const double y_d = std::log(lambda * delta), y_core = std::min(0.0, y_d);
    const double core = 2.0 * std::numbers::pi * detail::l6_radial(F, -20.0, y_core);
    const double i1 = core + 2.0 * std::numbers::pi * detail::l6_radial(F, y_core, y_d);
    const double i2 = i1 + 2.0 * std::numbers::pi * detail::l6_radial(F, y_d, y_d + std::log(2.0));
    const double a = std::pow(i1, 1.0 / 6.0), b = std::pow(i2, 1.0 / 6.0);
    norms.push_back(a);
    last_change = std::abs(b - a) / a;
    rep.add_row({lambda, a, b, core / i1, a * std::cbrt(lambda)});
  }
  const auto fit = fit_exponent(lambdas, norms);
  rep.summary["n"] = 2;
  rep.summary["delta"] = delta;
  rep.summary["fit"] = fit_json(fit);
  rep.checks.push_back(slope_check("l6 slope", fit, -1.0 / 3.0, tolerance, residual_cap));
  rep.checks.push_back({"delta doubling", last_change, 0.0, 0.01, true, {}});
  return rep;
}

/// Smooth bump supported in [a, b].
inline double annulus_bump(double d, double a, double b) {
  if (d <= a || d >= b) return 0.0;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double u = (d - mid) / half;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

struct RemainderOptions {
  int n = 2;
  std::vector<double> lambdas{32, 64, 128};
  double delta = 0.5;
  int nodes_per_wavelength = 12;
  int power_iterations = 200;
};

namespace detail {

// Zonal-sector matrix of r_lambda(d) = lambda^{(n-1)/2} e^{-i lambda d} c(d),
// normalised so its spectral norm is the L^2(S^n) -> L^2(S^n) norm on
// zonal functions.
inline std::vector<cplx> remainder_matrix(const RemainderOptions& o, double lambda, bool phase,
                                          std::vector<double>& phi) {
  static const Rule base = gauss_legendre(16);
  const double wavelength = 2.0 * std::numbers::pi / lambda;
  const double h_max = 16.0 * wavelength / o.nodes_per_wavelength;
  const Rule polar = composite_rule(0.0, std::numbers::pi, h_max, 16);
  const std::size_t M = polar.size();
  phi = polar.nodes;
  const double gap_limit = wavelength / 6.0;
  for (std::size_t i = 1; i < M; ++i)
    require(phi[i] - phi[i - 1] <= gap_limit, ErrorKind::resolution, "parametrix",
            "remainder probe: fewer than 6 nodes per wavelength");

  const int n = o.n;
  const double amp = std::pow(lambda, 0.5 * (n - 1));
  const double a = 0.5 * o.delta, b = o.delta;
  const double shell = sphere_volume(n - 1), ring = sphere_volume(n - 2);
  std::vector<double> W(M);
  for (std::size_t i = 0; i < M; ++i) W[i] = shell * polar.weights[i] * std::pow(std::sin(phi[i]), n - 1);

  const int alpha_panels = std::max(1, static_cast<int>(std::ceil(0.5 * o.delta / wavelength * o.nodes_per_wavelength / 16.0)) + 1);
  std::vector<cplx> A(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const double si = std::sin(phi[i]), ci = std::cos(phi[i]);
    for (std::size_t j = 0; j < M; ++j) {
      if (std::abs(phi[i] - phi[j]) >= b) continue;
      const double sj = std::sin(phi[j]), cj = std::cos(phi[j]);
      const double pp = si * sj;
      if (pp <= 0.0) continue;
      // cos d = ci cj + pp cos(alpha); d in (a, b) <=> cos(alpha) in (lo, hi).
      const double lo = std::clamp((std::cos(b) - ci * cj) / pp, -1.0, 1.0);
      const double hi = std::clamp((std::cos(a) - ci * cj) / pp, -1.0, 1.0);
      if (!(hi > lo)) continue;
      const double al = std::acos(hi), ah = std::acos(lo);
      cplx s = 0.0;
      const double hw = (ah - al) / alpha_panels;
      for (int p = 0; p < alpha_panels; ++p)
        for (std::size_t q = 0; q < base.size(); ++q) {
          const double al_q = al + hw * (p + 0.5 * (base.nodes[q] + 1.0));
          const double d = std::acos(std::clamp(ci * cj + pp * std::cos(al_q), -1.0, 1.0));
          const double c = annulus_bump(d, a, b) * std::pow(std::sin(al_q), n - 2);
          if (c == 0.0) continue;
          s += 0.5 * hw * base.weights[q] * c * (phase ? std::polar(1.0, -lambda * d) : cplx(1.0));
        }
      // n = 2: the azimuth runs over [0, 2 pi), the ring S^0 has two points.
      A[i * M + j] = amp * ring * s * std::sqrt(W[i] * W[j]) / shell;
    }
  }
  return A;
}

inline double spectral_norm(const std::vector<cplx>& A, std::size_t M, int iterations) {
  std::vector<cplx> x(M), y(M);
  for (std::size_t i = 0; i < M; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < M; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < M; ++j) s += A[i * M + j] * x[j];
      y[i] = s;
    }
    for (std::size_t j = 0; j < M; ++j) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < M; ++i) s += std::conj(A[i * M + j]) * y[i];
      x[j] = s;
    }
    double nx = 0.0;
    for (const auto& v : x) nx += std::norm(v);
    nx = std::sqrt(nx);
    if (nx == 0.0) return 0.0;
    const double next = std::sqrt(nx);
    for (auto& v : x) v /= nx;
    if (it > 10 && std::abs(next - sigma) <= 1e-12 * next) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace detail

/// L^2 norm of the model remainder operator on zonal functions of S^n, with
/// and without the phase e^{-i lambda d}. Descriptive: the amplitude control
/// grows like lambda^{(n-1)/2}; the oscillatory version grows more slowly.
inline ExperimentReport remainder_scale_check(const RemainderOptions& o) {
  detail::require(o.n >= 2, ErrorKind::config, "parametrix", "remainder probe needs n >= 2");
  detail::require(o.lambdas.size() >= 2, ErrorKind::config, "parametrix", "remainder probe needs at least 2 lambdas");
  detail::require(o.delta > 0.0 && o.delta < 1.0, ErrorKind::config, "parametrix", "remainder probe needs 0 < delta < 1");
  ExperimentReport rep;
  rep.experiment = "parametrix-remainder";
  rep.columns = {"lambda", "nodes", "norm", "norm_no_phase", "ratio"};
  std::vector<double> with, without;
  for (double lambda : o.lambdas) {
    std::vector<double> phi;
    const auto A = detail::remainder_matrix(o, lambda, true, phi);
    const auto B = detail::remainder_matrix(o, lambda, false, phi);
    const double a = detail::spectral_norm(A, phi.size(), o.power_iterations);
    const double b = detail::spectral_norm(B, phi.size(), o.power_iterations);
    with.push_back(a);
    without.push_back(b);
    rep.add_row({lambda, static_cast<long long>(phi.size()), a, b, a / b});
  }
  const double amp = 0.5 * (o.n - 1);
  auto slope = [&](const std::vector<double>& v) {
    return std::log(v.back() / v.front()) / std::log(o.lambdas.back() / o.lambdas.front());
  };
  rep.summary["n"] = o.n;
  rep.summary["delta"] = o.delta;
  rep.summary["amplitude_exponent"] = amp;
  rep.summary["slope"] = slope(with);
  rep.summary["control_slope"] = slope(without);
  if (o.lambdas.size() >= 4) {
    rep.summary["fit"] = fit_json(fit_exponent(o.lambdas, with));
  }
  rep.checks.push_back({"control slope", slope(without), amp - 0.02, amp + 0.02, true, {}});
  rep.checks.push_back({"phase slope below amplitude", slope(with), -std::numeric_limits<double>::infinity(), amp - 0.05, true, {}});
  return rep;
}

}  // namespace qlab
