#pragma once

#include <cmath>

namespace qlab {

/// Second-order forward-mode dual number: value, first and second derivative
/// with respect to one scalar variable.
struct Dual2 {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;

  constexpr Dual2() = default;
  constexpr Dual2(double value) : v(value) {}  // NOLINT: implicit on purpose
  constexpr Dual2(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

  static constexpr Dual2 variable(double x) { return {x, 1.0, 0.0}; }
};

namespace detail {
// chain rule for g(a) given g, g', g'' at a.v
constexpr Dual2 chain(const Dual2& a, double g, double g1, double g2) {
  return {g, g1 * a.d, g2 * a.d * a.d + g1 * a.dd};
}
}  // namespace detail

constexpr Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
constexpr Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
constexpr Dual2 operator-(const Dual2& a) { return {-a.v, -a.d, -a.dd}; }
constexpr Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
constexpr Dual2 reciprocal(const Dual2& a) {
  const double r = 1.0 / a.v;
  return detail::chain(a, r, -r * r, 2.0 * r * r * r);
}
constexpr Dual2 operator/(const Dual2& a, const Dual2& b) { return a * reciprocal(b); }

inline Dual2 sin(const Dual2& a) { return detail::chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Dual2 cos(const Dual2& a) { return detail::chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}
inline Dual2 log(const Dual2& a) { return detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Dual2 sqrt(const Dual2& a) {
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Dual2 pow(const Dual2& a, double q) {
  const double p = std::pow(a.v, q);
  return detail::chain(a, p, q * p / a.v, q * (q - 1.0) * p / (a.v * a.v));
}

}  // namespace qlab
