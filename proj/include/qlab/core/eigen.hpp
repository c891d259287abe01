#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/matrix.hpp"

namespace qlab {

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix<double> vectors;      // column i is the eigenvector of values[i]
};

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// orthogonal transform accumulated in v (adapted from the EISPACK tred2).
inline void tred2(Matrix<double>& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), e[i] coupling i-1 and i.
// Only the first z.rows() rows of the eigenvector matrix are tracked, which
// lets Golub-Welsch ask for first components alone.
inline void tql2(Matrix<double>& z, std::vector<double>& d, std::vector<double>& e,
                 int max_iter = 60) {
  const std::size_t n = d.size();
  const std::size_t rows = z.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter)
          raise(ErrorKind::numeric, "operator-core",
                "QL iteration did not converge for eigenvalue " + std::to_string(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < rows; ++k) {
            h = z(k, ii + 1);
            z(k, ii + 1) = s * z(k, ii) + c * h;
            z(k, ii) = c * z(k, ii) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

inline void sort_ascending(std::vector<double>& d, Matrix<double>& z) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    if (k != i) {
      std::swap(d[i], d[k]);
      for (std::size_t r = 0; r < z.rows(); ++r) std::swap(z(r, i), z(r, k));
    }
  }
}

}  // namespace detail

/// Full eigendecomposition of a real symmetric matrix: Householder
/// tridiagonalization followed by implicit-shift QL. Deterministic.
inline SymmetricEigen eigh(const Matrix<double>& a) {
  detail::require(a.rows() == a.cols(), ErrorKind::domain, "operator-core",
                  "eigh: matrix is not square");
  const std::size_t n = a.rows();
  SymmetricEigen out;
  if (n == 0) return out;
  Matrix<double> v = a;
  std::vector<double> d(n), e(n);
  detail::tred2(v, d, e);
  detail::tql2(v, d, e);
  detail::sort_ascending(d, v);
  out.values = std::move(d);
  out.vectors = std::move(v);
  return out;
}

/// Eigenvalues of the symmetric tridiagonal matrix (diag, off) together with
/// the squared first components of the normalized eigenvectors.
/// off[i] couples rows i and i+1 (size n-1).
inline void tridiagonal_first_components(const std::vector<double>& diag,
                                         const std::vector<double>& off,
                                         std::vector<double>& values,
                                         std::vector<double>& first_sq) {
  const std::size_t n = diag.size();
  std::vector<double> d = diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = off[i - 1];
  Matrix<double> z(1, n);
  z(0, 0) = 1.0;
  detail::tql2(z, d, e);
  detail::sort_ascending(d, z);
  values = std::move(d);
  first_sq.resize(n);
  for (std::size_t i = 0; i < n; ++i) first_sq[i] = z(0, i) * z(0, i);
}

}  // namespace qlab
