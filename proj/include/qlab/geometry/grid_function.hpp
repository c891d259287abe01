#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/geometry/basis.hpp"

namespace qlab {

namespace detail {
template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}
template <typename T>
T conjugate(const T& v) {
  if constexpr (std::is_arithmetic_v<T>)
    return v;
  else
    return std::conj(v);
}
}  // namespace detail

/// (sum w_i |f_i|^p)^{1/p}; max |f_i| for p = inf. Scaled by max |f| so
/// large p neither overflows nor underflows.
template <typename T>
double lp_norm(const QuadratureGrid& grid, std::span<const T> f, double p) {
  detail::require(!f.empty() && grid.size() > 0, ErrorKind::domain, "geometry-basis",
                  "lp_norm: empty grid");
  detail::require(f.size() == grid.size(), ErrorKind::domain, "geometry-basis",
                  "lp_norm: function does not live on this grid");
  detail::require(p >= 1.0, ErrorKind::domain, "geometry-basis", "lp_norm: p must be >= 1");
  double mx = 0.0;
  for (const auto& v : f) mx = std::max(mx, detail::magnitude(v));
  if (std::isinf(p) || mx == 0.0) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = detail::magnitude(f[i]) / mx;
    if (r > 0.0) s += std::exp(grid.log_weights[i] + p * std::log(r));
  }
  return mx * std::pow(s, 1.0 / p);
}

template <typename T>
double lp_norm(const QuadratureGrid& grid, const std::vector<T>& f, double p) {
  return lp_norm(grid, std::span<const T>(f), p);
}

/// sum w_i f_i conj(g_i).
template <typename T>
std::complex<double> inner_product(const QuadratureGrid& grid, std::span<const T> f,
                                   std::span<const T> g) {
  detail::require(f.size() == grid.size() && g.size() == grid.size(), ErrorKind::domain,
                  "geometry-basis", "inner_product: grid mismatch");
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += grid.weights[i] * std::complex<double>(f[i]) * std::conj(std::complex<double>(g[i]));
  return s;
}

template <typename T>
std::complex<double> inner_product(const QuadratureGrid& grid, const std::vector<T>& f,
                                   const std::vector<T>& g) {
  return inner_product(grid, std::span<const T>(f), std::span<const T>(g));
}

/// Samples a function of a grid point on every node.
template <typename F>
std::vector<double> sample(const QuadratureGrid& grid, F&& fn) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(grid.point(i));
  return out;
}

/// Coefficients <f, e_j> of a grid function against the basis.
inline std::vector<double> project(const Basis& basis, std::span<const double> f) {
  std::vector<double> c(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    c[j] = inner_product(basis.grid(), f, std::span<const double>(basis.values(j))).real();
  return c;
}

/// sum_j c_j e_j on the grid nodes.
inline std::vector<double> synthesize(const Basis& basis, std::span<const double> c) {
  std::vector<double> out(basis.grid().size(), 0.0);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (c[j] == 0.0) continue;
    const auto v = basis.values(j);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[j] * v[i];
  }
  return out;
}

}  // namespace qlab
