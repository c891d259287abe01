#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qlab/estimators/exponents.hpp"
#include "qlab/estimators/fit.hpp"
#include "qlab/estimators/norms.hpp"
#include "qlab/estimators/resolvent.hpp"
#include "qlab/estimators/weyl.hpp"
#include "qlab/operator/galerkin.hpp"

using namespace qlab;
using std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

namespace {

std::shared_ptr<const SpectralDecomposition> laplacian(const ModelManifold& M, int K) {
  auto b = std::make_shared<const Basis>(Basis::build(M, K));
  return std::make_shared<const SpectralDecomposition>(diagonalize(assemble(Potential::zero(), b)));
}

std::size_t first_of_degree(const SpectralDecomposition& d, int k) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (std::abs(d.mu[i] - k * (k + 1.0)) < 1e-9) return i;
  return d.size();
}

}  // namespace

TEST(Exponents, ClosedForms) {
  EXPECT_DOUBLE_EQ(sigma(4.0, 3), 0.25);
  EXPECT_DOUBLE_EQ(sigma(inf, 2), 0.5);
  EXPECT_THROW(sigma(1.5, 3), Error);
  EXPECT_DOUBLE_EQ(p_critical(2), 6.0);
  EXPECT_DOUBLE_EQ(p_critical(3), 4.0);
  EXPECT_DOUBLE_EQ(p_critical(5), 3.0);
  for (int n = 2; n <= 6; ++n) {
    EXPECT_EQ(sigma(2.0, n), 0.0);
    EXPECT_NEAR(sigma(p_critical(n), n), 1.0 / p_critical(n), 1e-15);
    EXPECT_DOUBLE_EQ(sigma(inf, n), 0.5 * (n - 1));
  }
}

TEST(Exponents, SigmaMonotoneContinuousWithKinkAtCritical) {
  for (int n = 2; n <= 6; ++n) {
    const double pc = p_critical(n);
    double prev = 0.0;
    for (double p = 2.0; p < 60.0; p += 0.01) {
      const double s = sigma(p, n);
      EXPECT_GE(s, prev - 1e-15);
      EXPECT_LE(s - prev, 0.02 * n);
      prev = s;
      // below p_c the low branch wins, above it the high branch
      const double ip = 1.0 / p;
      if (p < pc - 1e-9) { EXPECT_DOUBLE_EQ(s, 0.5 * (n - 1) * (0.5 - ip)); }
      if (p > pc + 1e-9) { EXPECT_DOUBLE_EQ(s, n * (0.5 - ip) - 0.5); }
    }
  }
}

TEST(Exponents, BochnerRieszIndexAndResolventPair) {
  EXPECT_DOUBLE_EQ(br_delta(1.0, 2), 0.5);
  for (int n = 2; n <= 5; ++n)
    for (double p = 1.0; p <= 10.0; p += 0.05)
      if (n * std::abs(0.5 - 1.0 / p) <= 0.5) { EXPECT_EQ(br_delta(p, n), 0.0); }
  const auto t = exponent_table(3, {2.0, 4.0, inf});
  EXPECT_EQ(t.sigma[0], 0.0);
  EXPECT_DOUBLE_EQ(t.sigma[2], 1.0);
  for (int n = 3; n <= 6; ++n) {
    const auto r = resolvent_pair(n);
    EXPECT_NEAR(n * (1.0 / r.p - 1.0 / r.p_dual), 2.0, 1e-14);
    EXPECT_NEAR(1.0 / r.p + 1.0 / r.p_dual, 1.0, 1e-14);
  }
  EXPECT_THROW(resolvent_pair(2), Error);
}

TEST(Fit, SyntheticOracles) {
  const auto lam = geometric_grid(4.0, 256.0);
  ASSERT_EQ(lam.size(), 13u);
  std::vector<double> a, b, c;
  for (double l : lam) {
    a.push_back(std::pow(l, 0.5));
    b.push_back(3.0);
    c.push_back(std::pow(l, 1.0 / 6) * (1.0 + 0.05 * std::sin(l)));
  }
  const auto fa = fit_exponent(lam, a);
  EXPECT_NEAR(fa.slope, 0.5, 1e-13);
  EXPECT_NEAR(fa.residual, 0.0, 1e-13);
  EXPECT_NEAR(fit_exponent(lam, b).slope, 0.0, 1e-14);
  EXPECT_NEAR(fit_exponent(lam, c).slope, 1.0 / 6, 0.02);
  b[2] = 0.0;
  EXPECT_THROW(fit_exponent(lam, b), Error);
  EXPECT_THROW(fit_exponent(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), Error);
  // bitwise reproducible
  EXPECT_EQ(fit_exponent(lam, c).slope, fit_exponent(lam, c).slope);
}

TEST(Quasimode, EigenfunctionClosedForm) {
  const auto d = laplacian(ModelManifold::sphere_zonal(2), 40);
  for (int k : {4, 9, 16, 25, 36}) {
    std::vector<double> a(d->size(), 0.0);
    a[k] = 1.0;
    const double lam = std::sqrt(k * (k + 1.0));
    const auto q = quasimode_ratio_coefficients(*d, a, lam, inf);
    // zonal harmonic: sup at the pole = sqrt((2k+1)/(4 pi))
    const double sup = std::sqrt((2 * k + 1) / (4 * pi));
    const double oracle = sup / (std::pow(lam, -0.5) * std::sqrt(1.0 + 4 * lam * lam) + std::sqrt(lam));
    EXPECT_NEAR(q.ratio, oracle, 1e-9 * oracle);
    EXPECT_NEAR(q.ratio, sup / (3 * std::sqrt(lam)), 0.02 * q.ratio);
    // bounded uniformly in k: tends to sqrt(2/(4 pi))/3
    EXPECT_GT(q.ratio, 0.12);
    EXPECT_LT(q.ratio, 0.14);
  }
}

TEST(Quasimode, ConstantScalingAndZero) {
  const auto d = laplacian(ModelManifold::sphere_zonal(2), 12);
  std::vector<double> a(d->size(), 0.0);
  a[0] = 1.0;
  const auto q = quasimode_ratio_coefficients(*d, a, 1.0, 4.0);
  const double u4 = std::pow(4 * pi, -0.5) * std::pow(4 * pi, 0.25);
  EXPECT_NEAR(q.ratio, u4 / (2.0 + 1.0), 1e-12);

  std::vector<double> r(d->size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sin(1.0 + i);
  const double r1 = quasimode_ratio_coefficients(*d, r, 5.0, 6.0).ratio;
  for (double& x : r) x *= -7.5;
  EXPECT_NEAR(quasimode_ratio_coefficients(*d, r, 5.0, 6.0).ratio, r1, 1e-12 * r1);
  const auto u = d->synthesize(std::span<const double>(r));
  EXPECT_NEAR(quasimode_ratio(*d, u, 5.0, 6.0).ratio, r1, 1e-10 * r1);

  std::vector<double> z(d->size(), 0.0);
  EXPECT_THROW(quasimode_ratio_coefficients(*d, z, 5.0, 4.0), Error);
}

TEST(ProjectorNorm, ExactCases) {
  const auto d = laplacian(ModelManifold::sphere_full_2d(), 16);
  for (int k : {3, 8, 12}) {
    const auto P = band_projector(d, std::sqrt(k * (k + 1.0)));
    EXPECT_EQ(projector_norm(P, 2.0).lower, 1.0);
    const auto pinf = projector_norm(P, inf);
    EXPECT_NEAR(pinf.lower, std::sqrt((2 * k + 1) / (4 * pi)), 1e-10);
    EXPECT_EQ(pinf.lower, pinf.upper);
  }
  // rank one: the norm of the eigenfunction
  const std::size_t i = first_of_degree(*d, 5) + 3;
  auto P = multiplier(d, [](double) { return 0.0; });
  P.coef[i] = 1.0;
  const auto v = d->values(i);
  for (double p : {4.0, 6.0}) {
    const auto r = projector_norm(P, p);
    EXPECT_NEAR(r.lower, lp_norm(d->basis->grid(), v, p), 1e-9);
    EXPECT_LE(r.lower, r.upper * (1 + 1e-12));
  }
}

TEST(ProjectorNorm, AscentBeatsEveryBandMember) {
  const auto d = laplacian(ModelManifold::sphere_full_2d(), 16);
  const int k = 10;
  const auto P = band_projector(d, std::sqrt(k * (k + 1.0)));
  const auto r = projector_norm(P, 6.0);
  EXPECT_FALSE(r.stagnated);
  EXPECT_EQ(r.rank, 2u * k + 1);
  EXPECT_LE(r.lower, r.upper * (1 + 1e-12));
  for (std::size_t i = 0; i < d->size(); ++i) {
    if (P.coef[i] == 0.0) continue;
    EXPECT_GE(r.lower, lp_norm(d->basis->grid(), d->values(i), 6.0) * (1 - 1e-9));
  }
  // the normalized zonal kernel at the pole is a candidate too
  const double zonal = std::sqrt(4 * pi / (2 * k + 1));
  std::vector<double> a(d->size(), 0.0);
  a[first_of_degree(*d, k)] = 1.0;
  EXPECT_GE(r.lower, eigen_lp_norm(*d, a, 6.0) * (1 - 1e-9));
  EXPECT_GT(zonal, 0.0);
}

TEST(LocalWeyl, AdditionTheoremOracles) {
  const int K = 20;
  const auto d = laplacian(ModelManifold::sphere_full_2d(), K);
  GridPoint x0;
  x0.polar = PolarNode::from_phi(1.1);
  x0.azimuth = 0.7;
  EXPECT_NEAR(local_weyl(*d, x0, std::sqrt(K * (K + 1.0)) + 1e-6), (K + 1.0) * (K + 1.0) / (4 * pi), 1e-10);
  EXPECT_NEAR(local_weyl(*d, x0, 1.0), 1.0 / (4 * pi), 1e-12);
  for (int mu = 5; mu <= 20; ++mu) {
    const double r = local_weyl(*d, x0, mu) / (mu * mu);
    EXPECT_GE(r, 0.07);
    EXPECT_LE(r, 0.09);
  }
  try {
    local_weyl(*d, x0, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::truncation);
  }
}

TEST(DivergentQuasimode, DirectSummationOracle) {
  const auto q = divergent_quasimode(4, 0.25, 4, 14);
  // oracle: dimension counts as binomial differences, kernel diagonal summed directly
  auto binom = [](double a, int b) { return std::exp(std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1)); };
  const double vol = 8.0 * pi * pi / 3.0;
  for (std::size_t j = 0; j < q.k.size(); ++j) {
    const int k = q.k[j];
    double diag = 0.0;
    for (long l = 0; l <= (2L << k); ++l) {
      const double lam = std::sqrt(double(l) * (l + 3));
      const double d = l < 2 ? (l == 0 ? 1.0 : 5.0) : binom(l + 4.0, 4) - binom(l + 2.0, 4);
      diag += LittlewoodPaley::beta1(lam / std::ldexp(1.0, k)) * d / vol;
    }
    EXPECT_NEAR(q.kernel_diagonal[j], diag, 1e-9 * diag);
    const double summand = std::pow(2.0, -4.0 * k) * std::pow(k, -0.75) * diag;
    EXPECT_NEAR(q.summand[j], summand, 1e-9 * summand);
    // diagonal ~ 2^{nk}
    EXPECT_GT(diag / std::pow(2.0, 4.0 * k), 0.01);
    EXPECT_LT(diag / std::pow(2.0, 4.0 * k), 1.0);
  }
  EXPECT_GT(q.growth, 1.6);
  EXPECT_LE(q.lambda, 16.0);
  EXPECT_GT(std::sqrt((q.degree + 1.0) * (q.degree + 4)), 16.0);
  EXPECT_GT(divergent_quasimode(5, 0.25, 4, 14).growth, 4.0);
  EXPECT_THROW(divergent_quasimode(3, 0.25, 4, 14), Error);
  EXPECT_THROW(divergent_quasimode(4, 0.6, 4, 14), Error);
}

TEST(DivergentQuasimode, CorrectionIsSmallInL2) {
  double prev = inf;
  for (int kmin : {4, 6, 8}) {
    const auto q = divergent_quasimode(4, 0.25, kmin, 14);
    EXPECT_LT(q.correction_norm, 1e-3);
    EXPECT_LT(q.correction_norm, prev);
    prev = q.correction_norm;
    EXPECT_NEAR(q.u_norm, 1.0, 1e-3);
    EXPECT_LT(q.correction_residual, 0.2);
    // the eigenfunction term alone: |lambda^2 - (lambda+i)^2| = sqrt(4 lambda^2 + 1)
    EXPECT_NEAR(q.residual, std::sqrt(4 * q.lambda * q.lambda + 1), 0.2);
  }
}

TEST(Resolvent, SingleModeClosedForm) {
  const int N = 16;
  detail::TorusField g(N), Rg(N);
  const double lambda = 5.3;
  const std::complex<double> z = (lambda + std::complex<double>(0, 1)) * (lambda + std::complex<double>(0, 1));
  g.set_spectrum([](int a, int b, int c) { return (a == 2 && b == -1 && c == 3) ? 1.0 : 0.0; });
  Rg.set_spectrum([&](int a, int b, int c) { return (a == 2 && b == -1 && c == 3) ? 1.0 / (14.0 - z) : 0.0; });
  g.to_space();
  Rg.to_space();
  const auto pr = resolvent_pair(3);
  EXPECT_NEAR(Rg.lp(pr.p_dual) / g.lp(pr.p), torus_single_mode_ratio(lambda, 14.0), 1e-12);
  EXPECT_NEAR(g.lp(pr.p), std::pow(2 * pi, 3.0 / pr.p), 1e-12);
}

TEST(Resolvent, ProbeHasNoGrowth) {
  ResolventProbeOptions o;
  o.lambdas = geometric_grid(4.0, 64.0);
  const auto rep = uniform_resolvent_probe(o);
  EXPECT_EQ(rep.rows.size(), 3 * o.lambdas.size());
  EXPECT_TRUE(rep.passed()) << rep.json().dump() << rep.csv();
  ResolventProbeOptions bad;
  bad.n = 2;
  bad.lambdas = o.lambdas;
  EXPECT_THROW(uniform_resolvent_probe(bad), Error);
}
