#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/smooth.hpp"
#include "qlab/geometry/quadrature.hpp"
#include "qlab/operator/multiplier.hpp"

namespace qlab {

/// Bochner-Riesz mean: (1 - lambda_i^2/lambda^2)^delta for lambda_i <= lambda, else 0.
/// delta = 0 gives the sharp projector onto [0, lambda].
inline MultiplierOperator bochner_riesz(std::shared_ptr<const SpectralDecomposition> spec, double lambda, double delta) {
  detail::require(delta >= 0.0, ErrorKind::domain, "dynamics", "bochner_riesz needs delta >= 0");
  detail::require(lambda > 0.0, ErrorKind::domain, "dynamics", "bochner_riesz needs lambda > 0");
  return multiplier(
      spec,
      [lambda, delta](double l) {
        if (l > lambda) return 0.0;
        if (delta == 0.0) return 1.0;
        return std::pow(std::max(0.0, 1.0 - (l * l) / (lambda * lambda)), delta);
      },
      "bochner-riesz");
}

/// m(P_V) for a bounded, possibly complex, symbol.
inline MultiplierOperator hormander_multiplier(std::shared_ptr<const SpectralDecomposition> spec,
                                               const std::function<std::complex<double>(double)>& m,
                                               std::string label = "hormander") {
  return multiplier(spec, m, std::move(label));
}

/// sup over dyadic mu = 2^j <= mu_max of the windowed Sobolev norm
/// ||beta(xi) m(mu xi)||_{H^s} on xi in [1/2, 2], with beta the dyadic bump.
/// Integer s uses s-th difference quotients; fractional s in (0, 1) the
/// Gagliardo double integral. The value is finite for Hormander symbols and
/// grows with `nodes` for symbols with jumps once s >= 1/2.
inline double besov_check(const std::function<std::complex<double>(double)>& m, double s, double mu_max, int nodes = 2048) {
  detail::require(s >= 0.0, ErrorKind::domain, "dynamics", "besov_check needs s >= 0");
  detail::require(nodes >= 16, ErrorKind::domain, "dynamics", "besov_check needs at least 16 nodes");
  const double a = 0.5, b = 2.0, h = (b - a) / nodes;
  double best = 0.0;
  for (double mu = 1.0; mu <= mu_max * (1 + 1e-12); mu *= 2.0) {
    std::vector<std::complex<double>> g(nodes + 1);
    for (int i = 0; i <= nodes; ++i) {
      const double xi = a + i * h;
      g[i] = LittlewoodPaley::beta1(xi) * m(mu * xi);
    }
    double norm2 = 0.0;
    for (int i = 0; i <= nodes; ++i) norm2 += h * std::norm(g[i]);
    const int si = static_cast<int>(std::floor(s));
    // integer part: derivatives up to order si by repeated forward differences
    std::vector<std::complex<double>> d = g;
    for (int order = 1; order <= si; ++order) {
      std::vector<std::complex<double>> nd(d.size() - 1);
      for (std::size_t i = 0; i + 1 < d.size(); ++i) nd[i] = (d[i + 1] - d[i]) / h;
      d = std::move(nd);
      for (const auto& x : d) norm2 += h * std::norm(x);
    }
    const double frac = s - si;
    if (frac > 0.0) {
      double gag = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
          const double dist = (j - i) * h;
          gag += 2.0 * h * h * std::norm(d[i] - d[j]) / std::pow(dist, 1.0 + 2.0 * frac);
        }
      norm2 += gag;
    }
    best = std::max(best, std::sqrt(norm2));
  }
  return best;
}

/// A family of spectral cutoffs beta_j used by the square function.
struct SquareFamily {
  std::vector<std::function<double(double)>> beta;
  std::string label;

  /// beta_0 = smooth step, beta_j(xi) = beta_1(xi / 2^{j-1}), enough levels for xi_max.
  static SquareFamily littlewood_paley(double xi_max) {
    SquareFamily f;
    f.label = "littlewood-paley";
    const int J = LittlewoodPaley::levels_for(xi_max);
    for (int j = 0; j <= J; ++j) f.beta.push_back([j](double xi) { return LittlewoodPaley::beta(j, xi); });
    return f;
  }

  static SquareFamily trivial() { return {{[](double) { return 1.0; }}, "trivial"}; }

  /// Config error unless sum_j beta_j = 1 on every frequency to 1e-8.
  void validate(const SpectralDecomposition& spec) const {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double s = 0.0;
      for (const auto& b : beta) s += b(spec.lambda[i]);
      if (std::abs(s - 1.0) > 1e-8)
        detail::raise(ErrorKind::config, "dynamics",
                      "square function family is not a partition of unity at frequency " + std::to_string(spec.lambda[i]));
    }
  }
};

/// Sf = (sum_j |beta_j(P_V) f|^2)^{1/2} on the grid, f given by eigen-coefficients.
inline std::vector<double> square_function(const SpectralDecomposition& spec, std::span<const double> a,
                                           const SquareFamily& family) {
  family.validate(spec);
  std::vector<double> S(spec.basis->grid().size(), 0.0);
  std::vector<double> aj(a.size());
  for (const auto& beta : family.beta) {
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      aj[i] = beta(spec.lambda[i]) * a[i];
      any = any || aj[i] != 0.0;
    }
    if (!any) continue;
    const auto g = spec.synthesize(std::span<const double>(aj));
    for (std::size_t x = 0; x < S.size(); ++x) S[x] += g[x] * g[x];
  }
  for (double& x : S) x = std::sqrt(x);
  return S;
}

}  // namespace qlab
