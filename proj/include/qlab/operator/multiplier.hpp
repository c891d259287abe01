#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/geometry/quadrature.hpp"
#include "qlab/operator/spectral.hpp"

namespace qlab {

/// m(P_V) for P_V = sqrt(H_V): one coefficient per eigenpair.
struct MultiplierOperator {
  std::shared_ptr<const SpectralDecomposition> spec;
  std::vector<std::complex<double>> coef;
  std::string label;

  std::size_t size() const { return coef.size(); }

  /// Acts on eigen-coefficients.
  std::vector<std::complex<double>> apply_coefficients(std::span<const std::complex<double>> a) const {
    std::vector<std::complex<double>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = coef[i] * a[i];
    return out;
  }

  std::vector<std::complex<double>> apply_coefficients(std::span<const double> a) const {
    std::vector<std::complex<double>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = coef[i] * a[i];
    return out;
  }

  /// sum_i m(lambda_i) <f, v_i> v_i on the grid.
  std::vector<std::complex<double>> apply(std::span<const double> f) const {
    const auto a = spec->analyze(f);
    const auto b = apply_coefficients(std::span<const double>(a));
    return spec->synthesize(std::span<const std::complex<double>>(b));
  }

  bool is_real() const {
    for (const auto& c : coef)
      if (c.imag() != 0.0) return false;
    return true;
  }
};

/// Pointwise product of coefficients: m1(P) m2(P).
inline MultiplierOperator compose(const MultiplierOperator& a, const MultiplierOperator& b) {
  detail::require(a.spec == b.spec, ErrorKind::domain, "operator-core", "compose: different decompositions");
  MultiplierOperator c{a.spec, std::vector<std::complex<double>>(a.size()), a.label + " * " + b.label};
  for (std::size_t i = 0; i < a.size(); ++i) c.coef[i] = a.coef[i] * b.coef[i];
  return c;
}

/// Coefficients c_i = m(lambda_i).
template <typename F>
MultiplierOperator multiplier(std::shared_ptr<const SpectralDecomposition> spec, F&& m, std::string label = "custom") {
  MultiplierOperator op{spec, std::vector<std::complex<double>>(spec->size()), std::move(label)};
  std::vector<double> bad;
  for (std::size_t i = 0; i < spec->size(); ++i) {
    const std::complex<double> v = m(spec->lambda[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) bad.push_back(spec->lambda[i]);
    op.coef[i] = v;
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "multiplier undefined at frequencies:";
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) os << ' ' << bad[i];
    if (bad.size() > 10) os << " ... (" << bad.size() << " total)";
    detail::raise(ErrorKind::domain, "operator-core", os.str());
  }
  return op;
}

/// Spectral projector onto frequencies in [lambda, lambda + 1].
inline MultiplierOperator band_projector(std::shared_ptr<const SpectralDecomposition> spec, double lambda) {
  detail::require(lambda >= 0.0, ErrorKind::domain, "operator-core", "band_projector needs lambda >= 0");
  return multiplier(
      spec, [lambda](double l) { return (l >= lambda && l <= lambda + 1.0) ? 1.0 : 0.0; },
      "band[" + std::to_string(lambda) + "]");
}

/// Nonnegative profile supported in (1/2, 1) with unit integral.
struct BumpProfile {
  std::function<double(double)> beta;
  std::string label;

  /// Default: normalized exp(-1/((s - 1/2)(1 - s))).
  static BumpProfile standard() {
    auto raw = [](double s) { return (s > 0.5 && s < 1.0) ? std::exp(-1.0 / ((s - 0.5) * (1.0 - s))) : 0.0; };
    const Rule r = composite_rule(0.5, 1.0, 1.0 / 16, 20);
    double mass = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) mass += r.weights[i] * raw(r.nodes[i]);
    return {[raw, mass](double s) { return raw(s) / mass; }, "standard"};
  }

  /// Throws a config error unless beta >= 0, vanishes off (1/2, 1) and has unit mass.
  void validate() const {
    for (double s : {0.0, 0.25, 0.5, 1.0, 1.5, 3.0})
      if (beta(s) != 0.0)
        detail::raise(ErrorKind::config, "operator-core", "bump profile must vanish outside (1/2, 1)");
    const Rule r = composite_rule(0.5, 1.0, 1.0 / 16, 20);
    double mass = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double b = beta(r.nodes[i]);
      if (b < 0.0) detail::raise(ErrorKind::config, "operator-core", "bump profile must be nonnegative");
      mass += r.weights[i] * b;
    }
    if (std::abs(mass - 1.0) > 1e-8)
      detail::raise(ErrorKind::config, "operator-core", "bump profile must have unit integral, got " + std::to_string(mass));
  }
};

/// int_0^inf e^{-t tau} lambda^2 beta(lambda^2 t) dt = int_{1/2}^1 e^{-s tau / lambda^2} beta(s) ds.
inline double bernstein_symbol(double tau, double lambda, const BumpProfile& beta) {
  static const Rule r = composite_rule(0.5, 1.0, 1.0 / 16, 20);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::exp(-r.nodes[i] * tau / (lambda * lambda)) * beta.beta(r.nodes[i]);
  return s;
}

/// The sandwich constant: C0^{-1} <= symbol <= C0 for 0 <= tau <= 4 lambda^2.
inline double bernstein_constant() { return std::exp(4.0); }

/// Bernstein-type operator with coefficients bernstein_symbol(mu_i, lambda).
inline MultiplierOperator bernstein(std::shared_ptr<const SpectralDecomposition> spec, double lambda,
                                    const BumpProfile& beta = BumpProfile::standard()) {
  detail::require(lambda >= 1.0, ErrorKind::domain, "operator-core", "bernstein needs lambda >= 1");
  beta.validate();
  MultiplierOperator op{spec, std::vector<std::complex<double>>(spec->size()), "bernstein"};
  for (std::size_t i = 0; i < spec->size(); ++i) op.coef[i] = bernstein_symbol(spec->lambda[i] * spec->lambda[i], lambda, beta);
  return op;
}

}  // namespace qlab
