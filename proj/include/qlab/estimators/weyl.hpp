#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/smooth.hpp"
#include "qlab/geometry/manifold.hpp"
#include "qlab/operator/spectral.hpp"

namespace qlab {

/// First Laplace frequency not contained in the truncation.
inline double truncation_frequency(const Basis& b) {
  const int K = b.K(), n = b.manifold().n;
  if (b.manifold().kind == ManifoldKind::torus) return std::sqrt(static_cast<double>(K) * K + 1.0);
  return std::sqrt((K + 1.0) * (K + n));
}

/// sum_{lambda_j <= mu} |e_j(x0)|^2.
inline double local_weyl(const SpectralDecomposition& spec, const GridPoint& x0, double mu) {
  const double cap = truncation_frequency(*spec.basis);
  if (mu >= cap)
    detail::raise(ErrorKind::truncation, "estimators",
                  "local_weyl: mu = " + std::to_string(mu) + " needs frequencies beyond the truncation (" +
                      std::to_string(cap) + ")");
  const auto v = eigenfunctions_at(spec, x0);
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size() && spec.lambda[i] <= mu; ++i) s += v[i] * v[i];
  return s;
}

/// Dimension of the degree-l spherical harmonics on S^n.
inline double harmonic_dimension(int n, long l) {
  if (l == 0) return 1.0;
  // (2l + n - 1) (l + n - 2)! / (l! (n - 1)!)
  double r = (2.0 * l + n - 1) / (n - 1);
  for (int k = 1; k <= n - 2; ++k) r *= static_cast<double>(l + k) / k;
  return r;
}

struct DivergentQuasimode {
  int n = 4;
  double eps = 0.25;
  double lambda = 0.0;
  long degree = 0;  // e_lambda is the normalized zonal harmonic of this degree
  std::vector<int> k;
  std::vector<double> kernel_diagonal;  // beta(P/2^k)(x0, x0)
  std::vector<double> summand;
  std::vector<double> partial_sum;
  double growth = 0.0;               // last partial sum / first
  double correction_norm = 0.0;      // ||u - e||_2
  double correction_residual = 0.0;  // ||(Delta + (lambda+i)^2)(u - e)||_2
  double u_norm = 0.0;               // ||u||_2
  double residual = 0.0;             // ||(Delta + (lambda+i)^2) u||_2
  double normalization = 0.0;        // residual / lambda + u_norm
};

/// u = e_lambda + sum_{2^k >= lambda} 2^{-(n/2+2)k} k^{-1/2-eps} beta(P/2^k)(., x0)
/// on S^n, evaluated exactly through degree sums with harmonic dimensions.
/// lambda is the largest Laplace frequency <= 2^k_min, and the sum runs over
/// k in [k_min, k_max].
inline DivergentQuasimode divergent_quasimode(int n, double eps, int k_min, int k_max) {
  detail::require(n >= 4, ErrorKind::domain, "estimators", "divergent quasimode needs n >= 4");
  detail::require(eps > 0.0 && eps < 0.5, ErrorKind::domain, "estimators", "divergent quasimode needs 0 < eps < 1/2");
  detail::require(k_min >= 2 && k_max >= k_min && k_max <= 24, ErrorKind::domain, "estimators",
                  "divergent quasimode needs 2 <= k_min <= k_max <= 24");
  const double vol = sphere_volume(n);
  auto freq = [n](long l) { return std::sqrt(static_cast<double>(l) * (l + n - 1)); };

  DivergentQuasimode q;
  q.n = n;
  q.eps = eps;
  long l0 = 0;
  while (freq(l0 + 1) <= std::ldexp(1.0, k_min)) ++l0;
  q.degree = l0;
  q.lambda = freq(l0);

  const long lmax = static_cast<long>(std::ldexp(1.0, k_max + 1)) + 1;
  std::vector<double> weight(k_max + 1, 0.0);
  for (int k = k_min; k <= k_max; ++k) weight[k] = std::pow(2.0, -(0.5 * n + 2.0) * k) * std::pow(k, -0.5 - eps);

  // c_l: coefficient of the zonal kernel Z_l(x, x0) in u - e
  std::vector<double> c(lmax + 1, 0.0);
  std::vector<double> diag(k_max + 1, 0.0);
  for (long l = 0; l <= lmax; ++l) {
    const double lam = freq(l);
    const double d = harmonic_dimension(n, l) / vol;
    for (int k = k_min; k <= k_max; ++k) {
      const double b = LittlewoodPaley::beta1(std::ldexp(lam, -k));
      if (b == 0.0) continue;
      c[l] += weight[k] * b;
      diag[k] += b * d;
    }
  }
  double run = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    q.k.push_back(k);
    q.kernel_diagonal.push_back(diag[k]);
    q.summand.push_back(weight[k] * diag[k]);
    run += weight[k] * diag[k];
    q.partial_sum.push_back(run);
  }
  q.growth = q.partial_sum.back() / q.partial_sum.front();

  const std::complex<double> z = (q.lambda + std::complex<double>(0, 1)) * (q.lambda + std::complex<double>(0, 1));
  const double e0 = 1.0 / std::sqrt(harmonic_dimension(n, l0) / vol);  // e = e0 * Z_l0(., x0)
  double cn = 0.0, cr = 0.0, un = 0.0, ur = 0.0;
  for (long l = 0; l <= lmax; ++l) {
    const double d = harmonic_dimension(n, l) / vol;  // ||Z_l(., x0)||^2
    const double m = std::norm(z - freq(l) * freq(l));
    const double cu = c[l] + (l == l0 ? e0 : 0.0);
    cn += c[l] * c[l] * d;
    cr += m * c[l] * c[l] * d;
    un += cu * cu * d;
    ur += m * cu * cu * d;
  }
  q.correction_norm = std::sqrt(cn);
  q.correction_residual = std::sqrt(cr);
  q.u_norm = std::sqrt(un);
  q.residual = std::sqrt(ur);
  q.normalization = q.residual / q.lambda + q.u_norm;
  return q;
}

}  // namespace qlab
