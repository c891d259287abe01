#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "qlab/core/error.hpp"

namespace qlab {

/// Volume of the unit round sphere S^d (d >= 0; vol(S^0) = 2).
inline double sphere_volume(int d) {
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

enum class ManifoldKind { sphere_zonal, sphere_full_2d, torus };

inline const char* to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::sphere_zonal: return "sphere-zonal";
    case ManifoldKind::sphere_full_2d: return "sphere-full-2d";
    case ManifoldKind::torus: return "torus";
  }
  return "?";
}

inline ManifoldKind parse_manifold_kind(const std::string& s) {
  if (s == "sphere-zonal") return ManifoldKind::sphere_zonal;
  if (s == "sphere-full-2d") return ManifoldKind::sphere_full_2d;
  if (s == "torus") return ManifoldKind::torus;
  detail::raise(ErrorKind::config, "geometry-basis",
                "unknown manifold '" + s + "' (expected sphere-zonal, sphere-full-2d, torus)");
}

/// Unit round sphere (zonal sector or full S^2) or the flat torus [0, 2pi)^n.
struct ModelManifold {
  ManifoldKind kind = ManifoldKind::sphere_zonal;
  int n = 2;

  static ModelManifold sphere_zonal(int n) { return make(ManifoldKind::sphere_zonal, n); }
  static ModelManifold sphere_full_2d() { return make(ManifoldKind::sphere_full_2d, 2); }
  static ModelManifold torus(int n) { return make(ManifoldKind::torus, n); }

  static ModelManifold make(ManifoldKind kind, int n) {
    detail::require(n >= 2, ErrorKind::domain, "geometry-basis", "dimension must be >= 2");
    detail::require(kind != ManifoldKind::sphere_full_2d || n == 2, ErrorKind::domain,
                    "geometry-basis", "sphere-full-2d requires n = 2");
    detail::require(kind != ManifoldKind::torus || n <= 3, ErrorKind::domain, "geometry-basis",
                    "torus supported for n <= 3");
    return ModelManifold{kind, n};
  }

  bool is_sphere() const { return kind != ManifoldKind::torus; }

  double volume() const {
    if (kind == ManifoldKind::torus) return std::pow(2.0 * std::numbers::pi, n);
    return sphere_volume(n);
  }
};

}  // namespace qlab
