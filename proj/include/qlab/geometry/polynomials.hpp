#pragma once

#include <cmath>
#include <vector>

#include "qlab/geometry/quadrature.hpp"

namespace qlab {

/// Polynomials p_0..p_K orthonormal for (1 - x^2)^{(n-2)/2} on [-1, 1]
/// (Legendre for n = 2, Gegenbauer otherwise), via the three-term recurrence
///   x p_k = sqrt(beta_{k+1}) p_{k+1} + sqrt(beta_k) p_{k-1}.
class ZonalPolynomials {
 public:
  ZonalPolynomials(int n, int K) : n_(n), K_(K), sb_(K + 2, 0.0) {
    const double a = 0.5 * (n - 2);
    for (int k = 1; k <= K + 1; ++k) sb_[k] = std::sqrt(symmetric_jacobi_beta(k, a));
    p0_ = 1.0 / std::sqrt(symmetric_jacobi_mass(a));
  }

  int n() const { return n_; }
  int max_degree() const { return K_; }

  /// Values at x for degrees 0..K.
  void values(double x, double* out) const {
    double pm1 = 0.0, p = p0_;
    out[0] = p;
    for (int k = 0; k < K_; ++k) {
      const double pn = (x * p - sb_[k] * pm1) / sb_[k + 1];
      pm1 = p;
      p = pn;
      out[k + 1] = p;
    }
  }

  /// Values, first and second derivatives in x for degrees 0..K.
  void derivatives(double x, double* p, double* dp, double* d2p) const {
    p[0] = p0_;
    dp[0] = 0.0;
    d2p[0] = 0.0;
    for (int k = 0; k < K_; ++k) {
      const double a = k > 0 ? p[k - 1] : 0.0;
      const double da = k > 0 ? dp[k - 1] : 0.0;
      const double d2a = k > 0 ? d2p[k - 1] : 0.0;
      p[k + 1] = (x * p[k] - sb_[k] * a) / sb_[k + 1];
      dp[k + 1] = (p[k] + x * dp[k] - sb_[k] * da) / sb_[k + 1];
      d2p[k + 1] = (2.0 * dp[k] + x * d2p[k] - sb_[k] * d2a) / sb_[k + 1];
    }
  }

 private:
  int n_;
  int K_;
  std::vector<double> sb_;
  double p0_;
};

/// Fully normalized associated Legendre functions Pbar_l^m(x), l = m..K, with
/// integral over [-1, 1] of Pbar^2 equal to 1. `s` is sqrt(1 - x^2).
inline void associated_legendre(int m, int K, double x, double s, double* out) {
  double pmm = 1.0 / std::sqrt(2.0);
  for (int j = 1; j <= m; ++j) pmm *= std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * s;
  if (m > K) return;
  out[0] = pmm;
  if (m + 1 > K) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
  for (int l = m + 2; l <= K; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b = std::sqrt(((ll - 1) * (ll - 1) - mm * mm) / (4.0 * (ll - 1) * (ll - 1) - 1.0));
    out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
  }
}

}  // namespace qlab
