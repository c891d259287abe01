#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "qlab/core/error.hpp"
#include "qlab/geometry/quadrature.hpp"

namespace qlab {

using cplx = std::complex<double>;

/// Modified Bessel function K_m of complex argument, Re z > 0.
///
/// Small |z| uses the integral of e^{-z cosh t} cosh(mt) over [0, inf),
/// refined by halving the panel width until two passes agree.
/// Large |z| uses K_m(z) = sqrt(pi/2z) e^{-z} a_m(z) where the symbol is
///   a_m(z) = Gamma(m+1/2)^{-1} int_0^inf e^{-u} u^{m-1/2} (1 + u/2z)^{m-1/2} du,
/// evaluated by Gauss-Laguerre.
struct BesselEvaluator {
  double switch_radius = 1.0;
  int laguerre_nodes = 120;
  double integral_tol = 1e-12;

  cplx operator()(double m, cplx z) const {
    check(z);
    m = std::abs(m);
    return std::abs(z) < switch_radius ? by_integral(m, z) : by_symbol(m, z);
  }

  cplx by_integral(double m, cplx z) const {
    check(z);
    m = std::abs(m);
    double h = 1.0;
    cplx prev = integral_pass(m, z, h);
    for (int round = 0; round < 8; ++round) {
      h *= 0.5;
      const cplx cur = integral_pass(m, z, h);
      if (std::abs(cur - prev) <= integral_tol * std::abs(cur)) return cur;
      prev = cur;
    }
    throw Error(ErrorKind::numeric, "parametrix", "bessel_k: integral did not stabilise");
  }

  cplx symbol(double m, cplx z) const {
    check(z);
    m = std::abs(m);
    const double alpha = m - 0.5;
    if (alpha == 0.0) return 1.0;
    const Rule& rule = laguerre(alpha);
    cplx s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * std::pow(1.0 + rule.nodes[i] / (2.0 * z), alpha);
    return s / std::tgamma(m + 0.5);
  }

  cplx by_symbol(double m, cplx z) const {
    return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) * symbol(m, z);
  }

 private:
  static void check(cplx z) {
    if (!(z.real() > 0.0) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::domain, "parametrix", "bessel_k needs Re z > 0");
  }

  // With v = cosh t and the v-contour turned onto the ray 1 + s e^{-i arg z},
  //   K_m(z) = e^{-z} e^{-i arg z} int_0^inf e^{-|z| s} g(v) ds,
  //   g(v) = (w^m + w^{-m}) / (2 sqrt(v^2 - 1)),  w = v + sqrt(v^2 - 1),
  // which no longer oscillates. s = e^y removes the s^{-1/2} endpoint.
  static cplx integral_pass(double m, cplx z, double h) {
    static const Rule base = gauss_legendre(16);
    const double az = std::abs(z);
    const cplx dir = std::polar(1.0, -std::arg(z));
    const double y_lo = -80.0;
    double y_hi = std::log((80.0 + 2.0 * m) / az) + 1.0;
    while (az * std::exp(y_hi) < 80.0 + m * std::max(0.0, y_hi)) y_hi += 0.5;
    const int panels = static_cast<int>(std::ceil((y_hi - y_lo) / h));
    const double hh = (y_hi - y_lo) / panels;
    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      for (std::size_t i = 0; i < base.size(); ++i) {
        const double y = y_lo + hh * (p + 0.5 * (base.nodes[i] + 1.0));
        const double s = std::exp(y);
        const cplx v = 1.0 + s * dir;
        const cplx q = std::sqrt(s * dir) * std::sqrt(v + 1.0);
        const cplx w = v + q;
        const cplx g = m == 0.0 ? 1.0 / q : 0.5 * (std::pow(w, m) + std::pow(w, -m)) / q;
        sum += 0.5 * hh * base.weights[i] * std::exp(-az * s) * g * s;
      }
    }
    return std::exp(-z) * dir * sum;
  }

  const Rule& laguerre(double alpha) const {
    static std::mutex mu;
    static std::map<std::pair<int, double>, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(laguerre_nodes, alpha);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_laguerre(laguerre_nodes, alpha)).first;
    return it->second;
  }
};

inline cplx bessel_k(double m, cplx z) { return BesselEvaluator{}(m, z); }

}  // namespace qlab
