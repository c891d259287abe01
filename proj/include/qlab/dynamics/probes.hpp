#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/rng.hpp"
#include "qlab/dynamics/multipliers.hpp"
#include "qlab/estimators/exponents.hpp"
#include "qlab/estimators/fit.hpp"
#include "qlab/estimators/norms.hpp"
#include "qlab/report/report.hpp"

namespace qlab {

/// Test functions as eigen-coefficient vectors, each tagged with a frequency scale.
struct Battery {
  std::string preset;
  std::uint64_t seed = 0;
  std::vector<std::string> names;
  std::vector<double> scale;
  std::vector<std::vector<double>> members;
};

inline const std::vector<std::string>& battery_presets() {
  static const std::vector<std::string> p = {"zonal-ladder", "zonal-harmonic", "point-concentrated", "random-band"};
  return p;
}

/// zonal-ladder: normalized zonal packets sum_{lambda_i in [k, 2k)} v_i(pole) v_i;
/// zonal-harmonic: the single eigenfunction nearest k that is nonzero at the pole;
/// point-concentrated: sum_i e^{-(lambda_i/k)^2} v_i(pole) v_i;
/// random-band: seeded Gaussian coefficients on lambda_i in [k, 2k).
inline Battery make_battery(const SpectralDecomposition& spec, const std::string& preset, const std::vector<double>& ladder,
                            std::uint64_t seed = 2024) {
  Battery b;
  b.preset = preset;
  b.seed = seed;
  const bool sphere = spec.basis->manifold().is_sphere();
  std::vector<double> pole(spec.size(), 0.0);
  if (sphere)
    for (std::size_t i = 0; i < spec.size(); ++i) pole[i] = spec.probe_values(i)[0];
  auto need_sphere = [&] {
    detail::require(sphere, ErrorKind::config, "dynamics", "battery preset " + preset + " needs a sphere");
  };
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const double k = ladder[j];
    std::vector<double> a(spec.size(), 0.0);
    if (preset == "zonal-ladder") {
      need_sphere();
      for (std::size_t i = 0; i < spec.size(); ++i)
        if (spec.lambda[i] >= k && spec.lambda[i] < 2 * k) a[i] = pole[i];
    } else if (preset == "zonal-harmonic") {
      need_sphere();
      std::size_t best = spec.size();
      for (std::size_t i = 0; i < spec.size(); ++i)
        if (std::abs(pole[i]) > 1e-12 && (best == spec.size() || std::abs(spec.lambda[i] - k) < std::abs(spec.lambda[best] - k)))
          best = i;
      if (best < spec.size()) a[best] = 1.0;
    } else if (preset == "point-concentrated") {
      need_sphere();
      for (std::size_t i = 0; i < spec.size(); ++i) a[i] = std::exp(-std::pow(spec.lambda[i] / k, 2)) * pole[i];
    } else if (preset == "random-band") {
      Rng rng(seed + j);
      for (std::size_t i = 0; i < spec.size(); ++i) {
        const double g = rng.normal();
        if (spec.lambda[i] >= k && spec.lambda[i] < 2 * k) a[i] = g;
      }
    } else {
      std::string names;
      for (const auto& p : battery_presets()) names += " " + p;
      detail::raise(ErrorKind::config, "dynamics", "unknown battery preset '" + preset + "'; valid:" + names);
    }
    double s = 0.0;
    for (double x : a) s += x * x;
    detail::require(s > 0.0, ErrorKind::truncation, "dynamics",
                    "battery " + preset + " has no modes at scale " + std::to_string(k) + "; increase K");
    for (double& x : a) x /= std::sqrt(s);
    b.names.push_back(preset + "@" + format_double(k));
    b.scale.push_back(k);
    b.members.push_back(std::move(a));
  }
  return b;
}

struct SquareProbe {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  std::vector<double> ratios;
};

/// ||Sf||_r / ||f||_r over a battery.
inline SquareProbe norm_equivalence_probe(const SpectralDecomposition& spec, double r, const Battery& battery,
                                          const SquareFamily& family) {
  detail::require(r > 1.0 && std::isfinite(r), ErrorKind::domain, "dynamics", "square function probe needs 1 < r < inf");
  SquareProbe out;
  const auto& grid = spec.basis->grid();
  for (const auto& a : battery.members) {
    const auto f = spec.synthesize(std::span<const double>(a));
    const auto S = square_function(spec, a, family);
    const double q = lp_norm(grid, S, r) / lp_norm(grid, f, r);
    out.ratios.push_back(q);
    out.min_ratio = std::min(out.min_ratio, q);
    out.max_ratio = std::max(out.max_ratio, q);
  }
  return out;
}

struct BochnerRieszProbeOptions {
  std::vector<double> lambdas;
  double delta = 0.6;
  double p = 1.0;
  double target = 0.0;
  double tolerance = 0.15;
  double min_slope = -std::numeric_limits<double>::infinity();  // used instead when finite
  double residual_cap = 0.1;
};

/// Lower bounds on ||S_lambda^delta||_{L^p -> L^p} on a sphere: the kernel
/// column at the pole (the point-mass limit, exact for p = 1), a smoothed
/// point mass at scale 1/lambda, and the oscillatory band kernel on
/// [lambda/2, lambda].
inline ExperimentReport br_norm_probe(std::shared_ptr<const SpectralDecomposition> spec, const BochnerRieszProbeOptions& opt) {
  detail::require(spec->basis->manifold().is_sphere(), ErrorKind::config, "dynamics", "Bochner-Riesz probe needs a sphere");
  detail::require(opt.p >= 1.0, ErrorKind::config, "dynamics", "Bochner-Riesz probe needs p >= 1");
  detail::require(opt.lambdas.size() >= 4, ErrorKind::config, "dynamics", "Bochner-Riesz probe needs at least 4 lambdas");
  const auto& grid = spec->basis->grid();
  const double lmax = opt.lambdas.back();
  detail::require(lmax < spec->basis->max_frequency(), ErrorKind::truncation, "dynamics",
                  "Bochner-Riesz probe: lambda " + std::to_string(lmax) + " exceeds the truncation");
  std::vector<double> pole(spec->size());
  for (std::size_t i = 0; i < spec->size(); ++i) pole[i] = spec->probe_values(i)[0];

  ExperimentReport rep;
  rep.experiment = "bochner-riesz";
  rep.columns = {"lambda", "delta", "p", "kernel_column", "smoothed_point", "band_kernel", "probe_norm"};
  std::vector<double> best;
  for (double lambda : opt.lambdas) {
    const auto S = bochner_riesz(spec, lambda, opt.delta);
    auto ratio = [&](const std::vector<double>& a) {
      std::vector<double> b(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) b[i] = S.coef[i].real() * a[i];
      const auto f = spec->synthesize(std::span<const double>(a));
      const auto g = spec->synthesize(std::span<const double>(b));
      return lp_norm(grid, g, opt.p) / lp_norm(grid, f, opt.p);
    };
    // kernel column: ||S(., pole)||_p, the limit of S applied to normalized point masses when p = 1
    std::vector<double> col(spec->size());
    for (std::size_t i = 0; i < spec->size(); ++i) col[i] = S.coef[i].real() * pole[i];
    const double kc = opt.p == 1.0 ? lp_norm(grid, spec->synthesize(std::span<const double>(col)), 1.0) : 0.0;
    std::vector<double> pt(spec->size()), band(spec->size(), 0.0);
    for (std::size_t i = 0; i < spec->size(); ++i) {
      pt[i] = std::exp(-std::pow(spec->lambda[i] / (2 * lambda), 2)) * pole[i];
      if (spec->lambda[i] >= 0.5 * lambda && spec->lambda[i] <= lambda) band[i] = pole[i];
    }
    const double sp = ratio(pt);
    const double bk = ratio(band);
    const double b = std::max({kc, sp, bk});
    best.push_back(b);
    rep.add_row({lambda, opt.delta, opt.p, kc, sp, bk, b});
  }
  const auto fit = fit_exponent(opt.lambdas, best);
  rep.summary["delta"] = opt.delta;
  rep.summary["p"] = opt.p;
  rep.summary["critical_delta"] = br_delta(opt.p, spec->basis->manifold().n);
  rep.summary["fit"] = fit_json(fit);
  if (std::isfinite(opt.min_slope)) {
    Check c{"growth slope", fit.slope, opt.min_slope, std::numeric_limits<double>::infinity(), fit.residual < opt.residual_cap, {}};
    if (!c.emitted) c.note = "fit residual above cap";
    rep.checks.push_back(c);
  } else {
    rep.checks.push_back(slope_check("bounded slope", fit, opt.target, opt.tolerance, opt.residual_cap));
  }
  return rep;
}

}  // namespace qlab
