#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/dynamics/heat.hpp"
#include "qlab/dynamics/multipliers.hpp"
#include "qlab/dynamics/probes.hpp"
#include "qlab/dynamics/strichartz.hpp"
#include "qlab/dynamics/wave.hpp"
#include "qlab/estimators/exponents.hpp"
#include "qlab/estimators/fit.hpp"
#include "qlab/estimators/norms.hpp"
#include "qlab/estimators/resolvent.hpp"
#include "qlab/estimators/weyl.hpp"
#include "qlab/experiments/config.hpp"
#include "qlab/operator/galerkin.hpp"
#include "qlab/operator/multiplier.hpp"
#include "qlab/operator/spectral.hpp"
#include "qlab/parametrix/hadamard.hpp"
#include "qlab/potentials/integrals.hpp"
#include "qlab/potentials/kato.hpp"
#include "qlab/potentials/potential.hpp"
#include "qlab/potentials/shift.hpp"
#include "qlab/report/report.hpp"

#ifndef QLAB_VERSION
#define QLAB_VERSION "unknown"
#endif

namespace qlab {

inline const char* version_string() { return QLAB_VERSION; }

namespace experiments {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Setup {
  ModelManifold manifold;
  Potential V;
  std::shared_ptr<const Basis> basis;
  std::shared_ptr<const SpectralDecomposition> spec;
  double shift = 0.0;
};

inline ModelManifold manifold_of(const Config& c) {
  const auto kind = c.text("manifold.kind");
  const int n = static_cast<int>(c.integer("manifold.n"));
  if (kind == "torus") return ModelManifold::torus(n);
  if (kind == "sphere-full-2d") return ModelManifold::sphere_full_2d();
  return ModelManifold::sphere_zonal(n);
}

inline Setup setup(const Config& c, int K) {
  Setup s;
  s.manifold = manifold_of(c);
  s.V = parse_potential(c.text("potential.V"), s.manifold.n);
  const int level = static_cast<int>(c.integer("potential.level"));
  s.basis = std::make_shared<const Basis>(Basis::build(s.manifold, K, BasisOptions{s.V.grid_options(level), 0}));
  const auto shift = c.text("potential.shift");
  s.shift = shift == "auto" ? positivity_shift(s.V, s.basis) : c.real("potential.shift");
  AssemblyOptions opt;
  opt.shift = s.shift;
  opt.level = level;
  s.spec = std::make_shared<const SpectralDecomposition>(diagonalize(assemble(s.V, s.basis, opt)));
  return s;
}

inline Setup setup(const Config& c) { return setup(c, static_cast<int>(c.integer("truncation.K"))); }

inline double tol(const Config& c, double fallback) {
  return c.text("tolerance.slope").empty() ? fallback : c.real("tolerance.slope");
}

inline double residual_cap(const Config& c, double fallback) {
  return c.text("tolerance.residual_cap").empty() ? fallback : c.real("tolerance.residual_cap");
}

/// p list with "pc" resolved.
inline std::vector<double> exponents(const Config& c, int n, std::vector<double> fallback) {
  auto ps = c.reals("grid.p", std::move(fallback));
  for (double& p : ps)
    if (std::isnan(p)) p = p_critical(n);
  return ps;
}

inline std::string p_label(double p) { return std::isinf(p) ? "inf" : format_double(p); }

inline void describe(ExperimentReport& r, const Setup& s) {
  r.summary["manifold"] = to_string(s.manifold.kind);
  r.summary["n"] = s.manifold.n;
  r.summary["potential"] = s.V.label;
  r.summary["K"] = s.basis->K();
  r.summary["modes"] = s.spec->size();
  r.summary["shift"] = s.shift;
  r.summary["max_frequency"] = s.spec->max_frequency();
}

inline GridPoint pole(const Setup& s) {
  const auto pr = s.basis->grid().probes();
  detail::require(!pr.empty(), ErrorKind::domain, "cli-experiments", "experiment needs a sphere");
  return pr.front();
}

// ---------------------------------------------------------------------------

inline ExperimentReport spectrum(const Config& c) {
  const auto s = setup(c);
  ExperimentReport r;
  r.experiment = "spectrum";
  r.columns = {"index", "sector", "eigenvalue", "mu", "lambda"};
  for (std::size_t i = 0; i < s.spec->size(); ++i)
    r.add_row({static_cast<long long>(i), static_cast<long long>(s.spec->sector[i]), s.spec->mu[i] - s.shift,
               s.spec->mu[i], s.spec->lambda[i]});
  describe(r, s);
  if (s.V.is_zero()) {
    std::vector<double> exact;
    for (std::size_t j = 0; j < s.basis->size(); ++j) exact.push_back(s.basis->mode(j).eigenvalue);
    std::sort(exact.begin(), exact.end());
    double err = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      err = std::max(err, std::abs(s.spec->mu[i] - s.shift - exact[i]));
      scale = std::max(scale, exact[i]);
    }
    r.checks.push_back({"laplace spectrum", err / scale, 0.0, 1e-12, true, {}});
  }
  return r;
}

inline ExperimentReport kato(const Config& c) {
  const int n = static_cast<int>(c.integer("manifold.n"));
  const auto V = parse_potential(c.text("potential.V"), n);
  const auto k = kato_report(V, n);
  ExperimentReport r;
  r.experiment = "kato";
  r.columns = {"radius", "modulus", "finest", "divergent", "converged"};
  for (std::size_t i = 0; i < k.radii.size(); ++i)
    r.add_row({k.radii[i], k.values[i].value, k.values[i].finest, static_cast<long long>(k.values[i].divergent),
               static_cast<long long>(k.values[i].converged)});
  r.summary["n"] = n;
  r.summary["potential"] = V.label;
  r.summary["verdict"] = to_string(k.verdict);
  r.summary["ratio"] = json_number(k.ratio);
  r.summary["ln_half_norm"] = json_number(k.ln_half.value);
  r.summary["ln_half_divergent"] = k.ln_half.divergent;
  const auto expect = c.text("probe.expect");
  if (expect != "any")
    r.checks.push_back({"verdict " + expect, expect == to_string(k.verdict) ? 1.0 : 0.0, 1.0, 1.0, true, {}});
  return r;
}

inline ExperimentReport counterexample(const Config& c) {
  const int n = static_cast<int>(c.integer("manifold.n"));
  detail::require(n >= 2, ErrorKind::config, "cli-experiments", "counterexample needs n >= 2");
  ExperimentReport r;
  r.experiment = "counterexample";
  r.columns = {"level", "nodes", "l2_norm", "max_f"};
  auto graded = [&](int level) {
    ZonalGridOptions o;
    o.graded = true;
    o.level = level;
    return make_zonal_grid(n, 32, o);
  };
  double worst = 0.0;
  for (const auto& node : graded(5).nodes) {
    const auto s = counterexample_residual(n, node);
    worst = std::max(worst, std::abs(s.residual) / (1.0 + std::abs(s.laplacian)));
  }
  std::vector<double> maxima, norms;
  for (int level = 3; level <= 7; ++level) {
    const auto g = graded(level);
    double l2 = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double f = counterexample_eigenfunction(n, g.nodes[i]);
      l2 += g.weights[i] * f * f;
      mx = std::max(mx, std::abs(f));
    }
    norms.push_back(std::sqrt(l2));
    maxima.push_back(mx);
    r.add_row({static_cast<long long>(level), static_cast<long long>(g.size()), norms.back(), mx});
  }
  const auto V = potentials::counterexample(n);
  const auto k = kato_report(V, n);
  r.summary["n"] = n;
  r.summary["residual_max"] = worst;
  r.summary["l2_norm"] = norms.back();
  r.summary["max_growth_3_to_6"] = maxima[3] / maxima[0];
  r.summary["kato_verdict"] = to_string(k.verdict);
  r.summary["kato_ratio"] = json_number(k.ratio);
  r.checks.push_back({"residual", worst, 0.0, 1e-8, true, {}});
  r.checks.push_back({"l2 norm stable", std::abs(norms[4] - norms[3]) / norms[4], 0.0, 1e-6, true, {}});
  r.checks.push_back({"max growth", maxima[3] / maxima[0], 2.0, inf, true, {}});
  r.checks.push_back({"kato ratio", k.ratio, 0.3, inf, true, {}});
  if (n >= 3) {
    const auto crit = ln_half_norm(V, n);
    const auto super = lq_norm(V, n, 0.5 * n + 0.25);
    r.summary["ln_half_norm"] = json_number(crit.value);
    r.summary["supercritical_norm"] = json_number(super.value);
    r.checks.push_back({"critical norm finite", std::isfinite(crit.value) ? 1.0 : 0.0, 1.0, 1.0, true, {}});
    r.checks.push_back({"supercritical norm divergent", super.divergent ? 1.0 : 0.0, 1.0, 1.0, true, {}});
  }
  const int K = static_cast<int>(c.integer("truncation.K"));
  if (K > 0) {
    const int level = static_cast<int>(c.integer("potential.level"));
    auto b = std::make_shared<const Basis>(Basis::build(ModelManifold::sphere_zonal(n), K, BasisOptions{V.grid_options(level), 0}));
    AssemblyOptions opt;
    opt.level = level;
    const auto d = diagonalize(assemble(V, b, opt));
    r.summary["K"] = K;
    r.summary["ground_state"] = d.mu.front();
  }
  return r;
}

inline ExperimentReport projector_norms(const Config& c) {
  const auto s = setup(c);
  const int n = s.manifold.n;
  const auto lambdas = c.reals("grid.lambdas", geometric_grid(10, 60));
  const auto ps = exponents(c, n, {2.0, p_critical(n), inf});
  ExperimentReport r;
  r.experiment = "projector-norms";
  r.columns = {"lambda", "p", "rank", "lower", "upper", "sigma"};
  describe(r, s);
  ProjectorNormOptions po;
  po.seed = static_cast<std::uint64_t>(c.integer("seed"));
  const double t = tol(c, 0.1), cap = residual_cap(c, 0.1);
  Json fits = Json::object();
  for (double p : ps) {
    std::vector<double> ls, vs;
    for (double l : lambdas) {
      const auto P = band_projector(s.spec, l);
      const auto v = projector_norm(P, p, po);
      r.add_row({l, p_label(p), static_cast<long long>(v.rank), v.lower, v.upper, sigma(p, n)});
      if (v.rank > 0) {
        ls.push_back(l);
        vs.push_back(v.lower);
      }
    }
    const auto f = fit_exponent(ls, vs);
    fits[p_label(p)] = fit_json(f);
    r.checks.push_back(slope_check("slope p=" + p_label(p), f, sigma(p, n), t, cap));
  }
  r.summary["fits"] = fits;
  return r;
}

inline ExperimentReport quasimode(const Config& c) {
  const auto s = setup(c);
  const int n = s.manifold.n;
  const auto ladder = c.reals("grid.lambdas", {8, 16, 24, 32, 48});
  const auto ps = exponents(c, n, {p_critical(n), inf});
  const auto bat = make_battery(*s.spec, c.text("probe.battery"), ladder, static_cast<std::uint64_t>(c.integer("seed")));
  ExperimentReport r;
  r.experiment = "quasimode";
  r.columns = {"lambda", "p", "member", "lp", "l2", "residual", "ratio"};
  describe(r, s);
  r.summary["battery"] = bat.preset;
  const double t = tol(c, 0.1), cap = residual_cap(c, 0.25);
  for (double p : ps) {
    std::vector<double> ls, vs;
    for (std::size_t m = 0; m < bat.members.size(); ++m) {
      const double l = bat.scale[m];
      const auto q = quasimode_ratio_coefficients(*s.spec, bat.members[m], l, p);
      r.add_row({l, p_label(p), bat.names[m], q.lp, q.l2, q.residual, q.ratio});
      ls.push_back(l);
      vs.push_back(q.ratio);
    }
    const auto f = fit_exponent(ls, vs);
    Check ch{"no growth p=" + p_label(p), f.slope, -inf, t, f.residual < cap, {}};
    if (!ch.emitted) ch.note = "fit residual above cap";
    r.checks.push_back(ch);
  }
  return r;
}

inline ExperimentReport bochner_riesz_probe(const Config& c) {
  const auto s = setup(c);
  const int n = s.manifold.n;
  BochnerRieszProbeOptions o;
  o.lambdas = c.reals("grid.lambdas", {8, 11.3137, 16, 22.6274, 32, 45.2548, 64});
  o.delta = c.real("probe.delta");
  o.p = exponents(c, n, {1.0}).front();
  o.tolerance = tol(c, 0.15);
  o.residual_cap = residual_cap(c, 0.1);
  if (o.delta <= br_delta(o.p, n)) o.min_slope = 0.1;
  auto r = br_norm_probe(s.spec, o);
  describe(r, s);
  return r;
}

inline ExperimentReport square_function_probe(const Config& c) {
  const auto s = setup(c);
  const auto ladder = c.reals("grid.lambdas", {2, 4, 8, 16, 32});
  const auto rs = c.reals("grid.r", {4.0 / 3.0, 2.0, 4.0});
  const auto bat = make_battery(*s.spec, c.text("probe.battery"), ladder, static_cast<std::uint64_t>(c.integer("seed")));
  const auto lp = SquareFamily::littlewood_paley(s.spec->max_frequency());
  ExperimentReport r;
  r.experiment = "square-function";
  r.columns = {"r", "member", "scale", "ratio"};
  describe(r, s);
  r.summary["battery"] = bat.preset;
  for (double q : rs) {
    const auto pr = norm_equivalence_probe(*s.spec, q, bat, lp);
    for (std::size_t m = 0; m < pr.ratios.size(); ++m) r.add_row({q, bat.names[m], bat.scale[m], pr.ratios[m]});
    r.checks.push_back({"lower constant r=" + p_label(q), pr.min_ratio, 0.2, inf, true, {}});
    r.checks.push_back({"upper constant r=" + p_label(q), pr.max_ratio, 0.0, 5.0, true, {}});
  }
  return r;
}

inline ExperimentReport multiplier_probe(const Config& c) {
  const auto s = setup(c);
  const auto ladder = c.reals("grid.lambdas", {2, 4, 8, 16, 32});
  const auto rs = c.reals("grid.r", {4.0 / 3.0, 4.0});
  const double gamma = c.real("probe.gamma");
  const std::function<std::complex<double>(double)> m = [gamma](double xi) {
    return std::exp(std::complex<double>(0.0, gamma * std::log1p(xi * xi)));
  };
  const int n = s.manifold.n;
  const double order = std::floor(0.5 * n) + 1.0;
  const auto op = hormander_multiplier(s.spec, m, "imaginary-power");
  const auto bat = make_battery(*s.spec, c.text("probe.battery"), ladder, static_cast<std::uint64_t>(c.integer("seed")));
  const auto& grid = s.basis->grid();
  ExperimentReport r;
  r.experiment = "multiplier";
  r.columns = {"r", "member", "scale", "ratio"};
  describe(r, s);
  const double besov = besov_check(m, order, s.spec->max_frequency());
  r.summary["gamma"] = gamma;
  r.summary["sobolev_order"] = order;
  r.summary["besov"] = besov;
  r.checks.push_back({"symbol norm", besov, 0.0, 1e3, true, {}});
  for (double q : rs) {
    std::vector<double> ls, vs;
    for (std::size_t k = 0; k < bat.members.size(); ++k) {
      const auto f = s.spec->synthesize(std::span<const double>(bat.members[k]));
      const auto mf = s.spec->synthesize(std::span<const std::complex<double>>(op.apply_coefficients(bat.members[k])));
      std::vector<double> mag(mf.size());
      for (std::size_t i = 0; i < mf.size(); ++i) mag[i] = std::abs(mf[i]);
      const double ratio = lp_norm(grid, std::span<const double>(mag), q) / lp_norm(grid, std::span<const double>(f), q);
      r.add_row({q, bat.names[k], bat.scale[k], ratio});
      ls.push_back(bat.scale[k]);
      vs.push_back(ratio);
    }
    const auto fit = fit_exponent(ls, vs);
    r.checks.push_back(slope_check("bounded slope r=" + p_label(q), fit, 0.0, tol(c, 0.1), residual_cap(c, 0.25)));
  }
  return r;
}

inline ExperimentReport heat_probe(const Config& c) {
  const auto s = setup(c);
  const auto ts = c.reals("grid.t", {0.01, 0.0158, 0.0251, 0.0398, 0.0631, 0.1});
  const int n = s.manifold.n;
  const auto x = pole(s);
  ExperimentReport r;
  r.experiment = "heat";
  r.columns = {"t", "diagonal", "flat", "ratio", "sup_kernel"};
  describe(r, s);
  std::vector<double> diag;
  for (double t : ts) {
    const double d = heat_kernel_diagonal(*s.spec, t, x);
    const double flat = std::pow(4.0 * std::numbers::pi * t, -0.5 * n);
    diag.push_back(d);
    r.add_row({t, d, flat, d / flat, heat_sup_kernel(*s.spec, t)});
  }
  const auto f = fit_exponent(ts, diag);
  r.summary["fit"] = fit_json(f);
  r.checks.push_back(slope_check("diagonal slope", f, -0.5 * n, tol(c, 0.1), residual_cap(c, 0.1)));
  return r;
}

inline ExperimentReport wave_speed(const Config& c) {
  const auto Ks = c.reals("truncation.Ks");
  const auto ts = c.reals("grid.t", {0.5});
  const double cutoff = c.real("probe.cutoff");
  ExperimentReport r;
  r.experiment = "wave-speed";
  r.columns = {"K", "t", "leakage", "cutoff", "margin", "mass"};
  std::vector<std::vector<double>> leak(ts.size());
  for (double K : Ks) {
    const auto s = setup(c, static_cast<int>(K));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto cl = cone_leakage(*s.spec, ts[i], cutoff);
      leak[i].push_back(cl.leakage);
      r.add_row({static_cast<long long>(K), ts[i], cl.leakage, cl.cutoff, cl.margin, cl.mass});
    }
    r.summary["potential"] = s.V.label;
    r.summary["shift_K" + std::to_string(static_cast<int>(K))] = s.shift;
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double increases = 0.0;
    for (std::size_t k = 1; k < leak[i].size(); ++k) increases += leak[i][k] >= leak[i][k - 1] ? 1.0 : 0.0;
    const std::string t = format_double(ts[i]);
    r.checks.push_back({"monotone t=" + t, increases, 0.0, 0.0, true, {}});
    r.checks.push_back({"leakage t=" + t, leak[i].back(), 0.0, 1e-3, true, {}});
  }
  return r;
}

inline ExperimentReport strichartz(const Config& c) {
  const auto s = setup(c);
  const int n = s.manifold.n;
  const auto ks = c.reals("grid.lambdas", {4, 8, 16, 32});
  const auto bat = make_battery(*s.spec, c.text("probe.battery"), ks, static_cast<std::uint64_t>(c.integer("seed")));
  const double pc = p_critical(n);
  ExperimentReport r;
  r.experiment = "strichartz";
  r.columns = {"k", "ratio", "spacetime_norm", "data_norm", "band_lambda", "band_norm"};
  describe(r, s);
  const std::vector<double> zero(s.spec->size(), 0.0);
  std::vector<double> ratios, band_l, band_v;
  for (std::size_t m = 0; m < bat.members.size(); ++m) {
    const auto q = strichartz_ratio(s.spec, bat.members[m], zero);
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.spec->size(); ++i)
      if (std::abs(s.spec->lambda[i] - ks[m]) < std::abs(s.spec->lambda[best] - ks[m])) best = i;
    const double bl = s.spec->lambda[best];
    const double bv = projector_norm(band_projector(s.spec, bl), pc).lower;
    ratios.push_back(q.ratio);
    band_l.push_back(1.0 + bl);
    band_v.push_back(bv);
    r.add_row({ks[m], q.ratio, q.spacetime_norm, q.data_norm, bl, bv});
  }
  const auto f1 = fit_exponent(ks, ratios);
  const auto f2 = fit_exponent(band_l, band_v);
  r.summary["p"] = pc;
  r.summary["battery"] = bat.preset;
  r.summary["ratio_fit"] = fit_json(f1);
  r.summary["band_fit"] = fit_json(f2);
  const double t = tol(c, 0.1), cap = residual_cap(c, 0.25);
  r.checks.push_back(slope_check("ratio slope", f1, 0.0, t, cap));
  r.checks.push_back(slope_check("band-bound slope", f2, 1.0 / pc, t, cap));
  return r;
}

inline ExperimentReport parametrix(const Config& c) {
  const auto lambdas = c.reals("grid.lambdas", {8, 16, 32, 64, 128, 256});
  auto r = kernel_l6_check(lambdas, c.real("probe.radius"), tol(c, 0.05), residual_cap(c, 0.05));
  const double pi = std::numbers::pi;

  const cplx half = bessel_k(0.5, 1.0);
  const double k_half = std::abs(half - std::sqrt(pi / 2.0) * std::exp(-1.0));
  double closed = 0.0;
  for (double lambda : {5.0, 50.0})
    for (int i = 1; i <= 20; ++i) {
      const double rr = 0.05 * i;
      const cplx exact = std::exp(cplx(0.0, 1.0) * cplx(lambda, 1.0) * rr) / (4.0 * pi * rr);
      closed = std::max(closed, std::abs(f_nu(3, 0, rr, lambda) - exact) / std::abs(exact));
    }
  double recursion = 0.0;
  for (double lambda : {5.0, 10.0})
    for (int i = 0; i <= 18; ++i) {
      const double rr = 0.1 + 0.05 * i, h = 1e-4;
      const HadamardKernel F(3, 1, lambda);
      const cplx f0 = F(rr), fp = F(rr + h), fm = F(rr - h);
      const cplx lap = (fp - 2.0 * f0 + fm) / (h * h) + 2.0 / rr * (fp - fm) / (2.0 * h);
      const cplx k(lambda, 1.0);
      const cplx rhs = f_nu(3, 0, rr, lambda);
      recursion = std::max(recursion, std::abs(-lap - k * k * f0 - rhs) / std::abs(rhs));
    }
  const auto slopes = regime_slopes(3, 0, 20.0, {8, 16, 32, 64, 128}, 0.3);
  r.summary["k_half_error"] = k_half;
  r.summary["closed_form_error"] = closed;
  r.summary["recursion_residual"] = recursion;
  r.summary["near_slope_n3"] = slopes.near;
  r.summary["far_slope_n3"] = slopes.far;
  r.checks.push_back({"K_1/2 identity", k_half, 0.0, 1e-10, true, {}});
  r.checks.push_back({"n=3 closed form", closed, 0.0, 1e-8, true, {}});
  r.checks.push_back({"recursion residual", recursion, 0.0, 1e-4, true, {}});
  r.checks.push_back({"near regime slope", slopes.near, -1.1, -0.9, true, {}});
  r.checks.push_back({"far regime slope", slopes.far, -0.1, 0.1, true, {}});
  if (c.boolean("probe.remainder")) {
    RemainderOptions o;
    o.n = 2;
    const auto rem = remainder_scale_check(o);
    r.summary["remainder"] = rem.summary;
  }
  return r;
}

inline ExperimentReport weyl(const Config& c) {
  const auto s = setup(c);
  const int n = s.manifold.n;
  const auto mus = c.reals("grid.mu", {10, 15, 20, 25, 30, 35, 40});
  const auto x = pole(s);
  const double constant = 1.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * n) * std::tgamma(0.5 * n + 1.0));
  ExperimentReport r;
  r.experiment = "weyl";
  r.columns = {"mu", "sum", "weyl", "ratio"};
  describe(r, s);
  double lo = inf, hi = 0.0;
  for (double mu : mus) {
    const double sum = local_weyl(*s.spec, x, mu);
    const double w = constant * std::pow(mu, n);
    lo = std::min(lo, sum / w);
    hi = std::max(hi, sum / w);
    r.add_row({mu, sum, w, sum / w});
  }
  r.summary["weyl_constant"] = constant;
  r.checks.push_back({"ratio min", lo, 0.9, 1.1, true, {}});
  r.checks.push_back({"ratio max", hi, 0.9, 1.1, true, {}});
  return r;
}

inline ExperimentReport divergent(const Config& c) {
  const int n = static_cast<int>(c.integer("manifold.n"));
  const auto q = divergent_quasimode(n, c.real("probe.eps"), static_cast<int>(c.integer("grid.k_min")),
                                     static_cast<int>(c.integer("grid.k_max")));
  ExperimentReport r;
  r.experiment = "divergent-quasimode";
  r.columns = {"k", "kernel_diagonal", "summand", "partial_sum"};
  for (std::size_t i = 0; i < q.k.size(); ++i)
    r.add_row({static_cast<long long>(q.k[i]), q.kernel_diagonal[i], q.summand[i], q.partial_sum[i]});
  r.summary["n"] = n;
  r.summary["eps"] = q.eps;
  r.summary["lambda"] = q.lambda;
  r.summary["degree"] = q.degree;
  r.summary["growth"] = q.growth;
  r.summary["correction_norm"] = q.correction_norm;
  r.summary["correction_residual"] = q.correction_residual;
  r.summary["u_norm"] = q.u_norm;
  r.summary["residual"] = q.residual;
  r.summary["normalization"] = q.normalization;
  r.checks.push_back({"partial-sum growth", q.growth, 1.6, inf, true, {}});
  r.checks.push_back({"normalization", q.normalization, 0.5, 2.0, true, {}});
  return r;
}

inline ExperimentReport resolvent(const Config& c) {
  ResolventProbeOptions o;
  o.n = static_cast<int>(c.integer("manifold.n"));
  o.lambdas = c.reals("grid.lambdas", geometric_grid(4, 64));
  o.tolerance = tol(c, 0.1);
  o.residual_cap = residual_cap(c, 0.25);
  return uniform_resolvent_probe(o);
}

}  // namespace experiments

using ExperimentFn = ExperimentReport (*)(const Config&);

inline ExperimentFn experiment_function(const std::string& name) {
  using namespace experiments;
  static const std::vector<std::pair<std::string, ExperimentFn>> table = {
      {"spectrum", spectrum},
      {"kato", kato},
      {"counterexample", counterexample},
      {"projector-norms", projector_norms},
      {"quasimode", quasimode},
      {"bochner-riesz", bochner_riesz_probe},
      {"square-function", square_function_probe},
      {"multiplier", multiplier_probe},
      {"heat", heat_probe},
      {"wave-speed", wave_speed},
      {"strichartz", strichartz},
      {"parametrix", parametrix},
      {"weyl", weyl},
      {"divergent-quasimode", divergent},
      {"resolvent-probe", resolvent},
  };
  for (const auto& [k, f] : table)
    if (k == name) return f;
  std::string msg = "unknown experiment '" + name + "'; valid names:";
  for (const auto& k : experiment_names()) msg += " " + k;
  detail::raise(ErrorKind::config, "cli-experiments", msg);
}

struct RunResult {
  ExperimentReport report;
  double seconds = 0.0;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
};

/// Validates, runs and returns the report (no files written).
inline RunResult run_experiment(const Config& c) {
  const auto diags = c.validate();
  if (!diags.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& d : diags) msg += "\n  " + d.str();
    detail::raise(ErrorKind::config, "cli-experiments", msg);
  }
  const auto fn = experiment_function(c.experiment());
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out{fn(c), 0.0, {}, {}};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// JSON document for a finished run: report plus config echo, version and runtime.
inline Json run_json(const Config& c, const RunResult& run) {
  Json j = run.report.json();
  Json cfg = Json::object();
  for (const auto& [k, v] : c.effective()) cfg[k] = v;
  j["config"] = cfg;
  j["config_source"] = c.source();
  j["config_text"] = c.source_text();
  j["columns"] = run.report.columns;
  j["version"] = version_string();
  j["runtime_seconds"] = run.seconds;
  return j;
}

/// Output file stem: output.prefix, else the config file stem, else the
/// experiment name.
inline std::string output_stem(const Config& c) {
  std::string prefix = c.text("output.prefix");
  if (prefix.empty() && !c.source().empty() && c.source().front() != '<')
    prefix = std::filesystem::path(c.source()).stem().string();
  return prefix.empty() ? c.experiment() : prefix;
}

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json atomically.
inline void write_run(const Config& c, RunResult& run, const std::filesystem::path& dir) {
  const std::string prefix = output_stem(c);
  run.csv_path = dir / (prefix + ".csv");
  run.json_path = dir / (prefix + ".json");
  write_atomic(run.csv_path, run.report.csv());
  write_atomic(run.json_path, run_json(c, run).dump(2) + "\n");
}

}  // namespace qlab
