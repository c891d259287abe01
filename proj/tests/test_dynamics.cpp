#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qlab/core/rng.hpp"
#include "qlab/dynamics/heat.hpp"
#include "qlab/dynamics/multipliers.hpp"
#include "qlab/dynamics/probes.hpp"
#include "qlab/dynamics/strichartz.hpp"
#include "qlab/dynamics/wave.hpp"
#include "qlab/operator/galerkin.hpp"

using namespace qlab;
using std::numbers::pi;

namespace {

std::shared_ptr<const SpectralDecomposition> decompose(const ModelManifold& M, int K, const Potential& V = Potential::zero()) {
  auto b = std::make_shared<const Basis>(Basis::build(M, K, BasisOptions{V.grid_options(5), 0}));
  return std::make_shared<const SpectralDecomposition>(diagonalize(assemble(V, b)));
}

std::vector<double> random_coefficients(std::size_t n, std::uint64_t seed, std::size_t keep) {
  Rng rng(seed);
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, keep); ++i) a[i] = rng.normal();
  return a;
}

double l2(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(Heat, SemigroupAndSmallTime) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 30, Potential::expression("cos(phi)"));
  EXPECT_THROW(heat(d, 0.0), Error);
  const auto ab = compose(heat(d, 0.1), heat(d, 0.25));
  const auto c = heat(d, 0.35);
  for (std::size_t i = 0; i < d->size(); ++i) EXPECT_NEAR(ab.coef[i].real(), c.coef[i].real(), 1e-13 * c.coef[i].real());
  const auto a = random_coefficients(d->size(), 3, 10);
  auto defect = [&](double t) {
    const auto h = heat(d, t).apply_coefficients(std::span<const double>(a));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(h[i] - a[i]);
    return std::sqrt(s);
  };
  double Ha = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) Ha += std::pow(d->mu[i] * a[i], 2);
  Ha = std::sqrt(Ha);
  // ||e^{-tH} f - f|| = t ||H f|| + O(t^2)
  EXPECT_NEAR(defect(1e-4) / 1e-4, Ha, 0.01 * Ha);
  EXPECT_NEAR(defect(1e-6) / 1e-6, Ha, 1e-4 * Ha);
}

TEST(Heat, DiagonalOnSphereMatchesFlatKernel) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 80);
  const GridPoint pole{PolarNode::from_phi(0.0), 0.0, {}};
  std::vector<double> ts, vals;
  for (double t = 0.01; t <= 0.1 + 1e-12; t *= std::pow(10.0, 0.125)) {
    double oracle = 0.0;
    for (int k = 0; k <= 400; ++k) oracle += (2 * k + 1) * std::exp(-t * k * (k + 1.0)) / (4 * pi);
    const double v = heat_kernel_diagonal(*d, t, pole);
    EXPECT_NEAR(v, oracle, 1e-10 * oracle);
    EXPECT_NEAR(v * 4 * pi * t, 1.0, 0.1);
    ts.push_back(t);
    vals.push_back(v);
  }
  EXPECT_NEAR(fit_exponent(ts, vals).slope, -1.0, 0.1);
  // the kernel is largest on the diagonal, which the pole pair realizes on a zonal basis
  EXPECT_NEAR(heat_sup_kernel(*d, 0.05), heat_kernel_diagonal(*d, 0.05, pole), 1e-9);
}

TEST(Heat, KernelIsPositive) {
  for (const auto& V : {Potential::zero(), potentials::counterexample_cut(2, 0.3)}) {
    const auto d = decompose(ModelManifold::sphere_zonal(2), 64, V);
    std::vector<double> col(d->size());
    for (std::size_t i = 0; i < d->size(); ++i) col[i] = std::exp(-0.05 * d->mu[i]) * d->probe_values(i)[0];
    const auto k = d->synthesize(std::span<const double>(col));
    double mn = 1e300, mx = 0.0;
    for (double x : k) {
      mn = std::min(mn, x);
      mx = std::max(mx, x);
    }
    // V = 0 is exact; the cut potential jumps, so its Galerkin eigenfunctions carry ~1e-5 errors
    EXPECT_GT(mn, (V.is_zero() ? -1e-12 : -1e-4) * mx) << V.label;
  }
}

TEST(Wave, SpectralIdentities) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 24, Potential::expression("2 + sin(phi)"));
  const auto c0 = wave_cosine(d, 0.0);
  for (const auto& x : c0.coef) EXPECT_EQ(x, 1.0);
  EXPECT_THROW(wave_cosine(d, 2.0), Error);
  const double t = 0.6;
  const auto c = wave_cosine(d, t), c2 = wave_cosine(d, 2 * t);
  for (std::size_t i = 0; i < d->size(); ++i) {
    EXPECT_EQ(c.coef[i].real(), std::cos(t * d->lambda[i]));
    EXPECT_NEAR(c2.coef[i].real(), 2 * std::pow(c.coef[i].real(), 2) - 1, 1e-14);
  }
}

TEST(Wave, SolutionInitialDataAndEnergy) {
  const auto d = decompose(ModelManifold::sphere_zonal(3), 20);  // has a zero mode
  WaveSolution w{d, random_coefficients(d->size(), 7, 21), random_coefficients(d->size(), 8, 21)};
  const auto u0 = w.at(0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) EXPECT_EQ(u0[i], w.f0[i]);
  const double h = 1e-5;
  const auto up = w.at(h), um = w.at(-h);
  for (std::size_t i = 0; i < u0.size(); ++i) EXPECT_NEAR((up[i] - um[i]) / (2 * h), w.f1[i], 1e-8 * (1 + std::abs(w.f1[i])));
  // zero mode: u = f0 + t f1
  EXPECT_EQ(d->lambda[0], 0.0);
  EXPECT_NEAR(w.at(0.7)[0], w.f0[0] + 0.7 * w.f1[0], 1e-15);
  const double e0 = w.energy(0.0);
  for (double t : {0.1, 0.5, 1.0, 3.0}) EXPECT_NEAR(w.energy(t), e0, 1e-8 * e0);
}

TEST(Wave, ConeLeakage) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 128, potentials::counterexample_cut(2, 0.3));
  EXPECT_EQ(cone_leakage(*d, 0.0).leakage, 0.0);
  const auto c = cone_leakage(*d, 0.5);
  EXPECT_NEAR(c.cutoff, d->basis->max_frequency() / 4, 1e-12);
  EXPECT_NEAR(c.margin, 4 / c.cutoff, 1e-15);
  EXPECT_GT(c.leakage, 0.0);
  EXPECT_LT(c.leakage, 1e-3);
  // an unmollified propagator leaks far more
  EXPECT_THROW(cone_leakage(*d, 0.5, d->basis->max_frequency()), Error);
  // the leaked mass grows when the margin shrinks below the mollifier width
  EXPECT_GT(cone_leakage(*d, 0.5, 0.1 * d->basis->max_frequency()).leakage, c.leakage);
}

TEST(BochnerRiesz, Coefficients) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 20);
  const double lambda = d->lambda[6];
  const auto S = bochner_riesz(d, lambda, 0.7);
  EXPECT_EQ(S.coef[6].real(), 0.0);
  EXPECT_NEAR(S.coef[3].real(), std::pow(1 - d->mu[3] / (lambda * lambda), 0.7), 1e-14);
  EXPECT_EQ(S.coef[7].real(), 0.0);
  const auto P = bochner_riesz(d, lambda, 0.0);
  const auto PP = compose(P, P);
  for (std::size_t i = 0; i < d->size(); ++i) {
    EXPECT_EQ(P.coef[i].real(), i <= 6 ? 1.0 : 0.0);
    EXPECT_EQ(PP.coef[i], P.coef[i]);
  }
  EXPECT_THROW(bochner_riesz(d, lambda, -0.1), Error);
}

TEST(BochnerRiesz, BelowCriticalIndexGrows) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 96);
  BochnerRieszProbeOptions o;
  o.lambdas = geometric_grid(8.0, 45.3);
  o.delta = 0.3;
  o.min_slope = 0.1;
  const auto rep = br_norm_probe(d, o);
  EXPECT_TRUE(rep.passed()) << rep.json().dump();
  // kernel column equals the L1 norm of the summed kernel and dominates the battery
  for (const auto& row : rep.rows) EXPECT_EQ(std::get<double>(row[3]), std::get<double>(row[6]));
}

TEST(Hormander, ImaginaryPowerAndSharpCutoff) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 40, Potential::constant_value(1.0));
  const auto one = hormander_multiplier(d, [](double) { return 1.0; });
  for (const auto& c : one.coef) EXPECT_EQ(c, 1.0);
  auto ipow = [](double l) { return std::exp(std::complex<double>(0.0, std::log(l))); };
  const auto m = hormander_multiplier(d, ipow);
  const auto a = random_coefficients(d->size(), 11, 41);
  const auto b = m.apply_coefficients(std::span<const double>(a));
  double nb = 0.0;
  for (const auto& x : b) nb += std::norm(x);
  EXPECT_NEAR(std::sqrt(nb), l2(a), 1e-12 * l2(a));

  const double b1 = besov_check(ipow, 1.0, 64.0, 1024), b2 = besov_check(ipow, 1.0, 64.0, 2048);
  EXPECT_TRUE(std::isfinite(b1));
  EXPECT_NEAR(b1, b2, 0.01 * b2);
  const double ones = besov_check([](double) { return 1.0; }, 2.0, 64.0, 1024);
  EXPECT_NEAR(ones, besov_check([](double) { return 1.0; }, 2.0, 64.0, 2048), 0.01 * ones);

  auto sharp = [](double l) { return l <= 20.0 ? 1.0 : 0.0; };
  const double s1 = besov_check(sharp, 1.0, 64.0, 512), s2 = besov_check(sharp, 1.0, 64.0, 2048);
  EXPECT_GT(s2, 1.8 * s1);
  const double f1 = besov_check(sharp, 0.75, 64.0, 256), f2 = besov_check(sharp, 0.75, 64.0, 1024);
  EXPECT_GT(f2, 1.2 * f1);
}

TEST(SquareFunction, ExactCases) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 40);
  const auto a = random_coefficients(d->size(), 5, 41);
  const auto f = d->synthesize(std::span<const double>(a));
  const auto S = square_function(*d, a, SquareFamily::trivial());
  for (std::size_t x = 0; x < f.size(); ++x) EXPECT_NEAR(S[x], std::abs(f[x]), 1e-13);

  // constant mode sits where beta_0 = 1
  std::vector<double> c(d->size(), 0.0);
  c[0] = 1.0;
  const auto lp = SquareFamily::littlewood_paley(d->max_frequency());
  const auto Sc = square_function(*d, c, lp);
  EXPECT_NEAR(Sc[10], 1.0 / std::sqrt(4 * pi), 1e-14);

  // torus mode with |m| = 4 sits where beta_3 = 1
  const auto t = decompose(ModelManifold::torus(2), 6, Potential::constant_value(0.0));
  std::size_t i4 = 0;
  while (t->lambda[i4] != 4.0) ++i4;
  std::vector<double> e(t->size(), 0.0);
  e[i4] = 1.0;
  const auto fe = t->synthesize(std::span<const double>(e));
  const auto Se = square_function(*t, e, SquareFamily::littlewood_paley(t->max_frequency()));
  for (std::size_t x = 0; x < fe.size(); ++x) EXPECT_NEAR(Se[x], std::abs(fe[x]), 1e-13);

  SquareFamily bad{{[](double xi) { return 0.5 * smooth_step(xi); }}, "bad"};
  EXPECT_THROW(square_function(*d, a, bad), Error);
}

TEST(SquareFunction, NormEquivalenceBattery) {
  for (const auto& V : {Potential::zero(), potentials::counterexample_cut(2, 0.3)}) {
    const auto d = decompose(ModelManifold::sphere_zonal(2), 64, V);
    const auto lp = SquareFamily::littlewood_paley(d->max_frequency());
    for (const std::string preset : {"zonal-ladder", "point-concentrated", "random-band"}) {
      const auto bat = make_battery(*d, preset, {2, 4, 8, 16, 32});
      const auto r2 = norm_equivalence_probe(*d, 2.0, bat, lp);
      EXPECT_GE(r2.min_ratio, 1 / std::sqrt(2.0) - 1e-12);
      EXPECT_LE(r2.max_ratio, 1.0 + 1e-12);
      for (double r : {4.0 / 3, 4.0}) {
        const auto q = norm_equivalence_probe(*d, r, bat, lp);
        EXPECT_GT(q.min_ratio, 0.3) << preset << " r=" << r;
        EXPECT_LT(q.max_ratio, 3.0) << preset << " r=" << r;
      }
    }
  }
}

TEST(Battery, DeterministicAndValidated) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 32);
  const auto a = make_battery(*d, "random-band", {4, 8}, 99);
  const auto b = make_battery(*d, "random-band", {4, 8}, 99);
  EXPECT_EQ(a.members, b.members);
  EXPECT_NE(a.members, make_battery(*d, "random-band", {4, 8}, 100).members);
  EXPECT_THROW(make_battery(*d, "nope", {4}), Error);
  EXPECT_THROW(make_battery(*d, "zonal-ladder", {100}), Error);
}

TEST(Strichartz, ConstantModeClosedForm) {
  const auto d = decompose(ModelManifold::sphere_zonal(2), 16);
  std::vector<double> f0(d->size(), 0.0), f1(d->size(), 0.0);
  f0[0] = 1.0;
  const auto r = strichartz_ratio(d, f0, f1);
  EXPECT_NEAR(r.ratio, std::pow(4 * pi, -0.5 + 1.0 / 6), 1e-12);
  f0[16] = 1.0;
  StrichartzOptions coarse;
  coarse.panels = 1;
  coarse.order = 4;
  EXPECT_THROW(strichartz_ratio(d, f0, f1, coarse), Error);
}

TEST(Strichartz, ZonalLadderHasNoGrowthAndBandBoundSlope) {
  for (const auto& V : {Potential::zero(), potentials::counterexample_cut(2, 0.3)}) {
    const auto d = decompose(ModelManifold::sphere_zonal(2), 96, V);
    const std::vector<double> ks = {4, 8, 16, 32};
    const auto bat = make_battery(*d, "zonal-ladder", ks);
    std::vector<double> ratios, band_l, band_v;
    const std::vector<double> zero(d->size(), 0.0);
    for (const auto& a : bat.members) ratios.push_back(strichartz_ratio(d, a, zero).ratio);
    EXPECT_NEAR(fit_exponent(ks, ratios).slope, 0.0, 0.1) << V.label;
    for (double k : ks) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < d->size(); ++i)
        if (std::abs(d->lambda[i] - k) < std::abs(d->lambda[best] - k)) best = i;
      band_l.push_back(1 + d->lambda[best]);
      band_v.push_back(projector_norm(band_projector(d, d->lambda[best]), 6.0).lower);
    }
    EXPECT_NEAR(fit_exponent(band_l, band_v).slope, 1.0 / 6, 0.1) << V.label;
  }
}
