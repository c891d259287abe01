#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qlab/parametrix/bessel.hpp"
#include "qlab/parametrix/hadamard.hpp"

using namespace qlab;
using std::numbers::pi;

namespace {

// Independent oracle: trapezoid rule on the cosh integral, valid for
// real positive z where the integrand is smooth and decays doubly fast.
double k_trapezoid(double m, double x) {
  const double h = 1e-3;
  double s = 0.5 * std::exp(-x);
  for (int k = 1; k < 20000; ++k) {
    const double t = k * h;
    s += std::exp(-x * std::cosh(t)) * std::cosh(m * t);
  }
  return s * h;
}

cplx radial_operator(int n, int nu, double lambda, double r) {
  const double h = 1e-4;
  const HadamardKernel F(n, nu, lambda);
  const cplx f0 = F(r), fp = F(r + h), fm = F(r - h);
  const cplx d2 = (fp - 2.0 * f0 + fm) / (h * h), d1 = (fp - fm) / (2.0 * h);
  const cplx k(lambda, 1.0);
  return -(d2 + (n - 1.0) / r * d1) - k * k * f0;
}

}  // namespace

TEST(Bessel, HalfOrderClosedForm) {
  EXPECT_NEAR(bessel_k(0.5, 1.0).real(), std::sqrt(pi / 2.0) * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(std::sqrt(pi / 2.0) * std::exp(-1.0), 0.46107, 1e-5);
  BesselEvaluator b;
  for (cplx z : {cplx(0.3, 0.2), cplx(0.05, -0.9), cplx(2.0, -7.0), cplx(1.0, 0.0)}) {
    const cplx exact = std::sqrt(pi / (2.0 * z)) * std::exp(-z);
    EXPECT_LT(std::abs(b.by_integral(0.5, z) - exact), 1e-10 * std::abs(exact));
    EXPECT_LT(std::abs(b(0.5, z) - exact), 1e-10 * std::abs(exact));
  }
}

TEST(Bessel, AgreesWithTrapezoidOracleOnRealAxis) {
  for (double m : {0.0, 1.0, 1.5, 2.0})
    for (double x : {0.2, 0.9, 1.1, 3.0}) {
      const double ref = k_trapezoid(m, x);
      EXPECT_NEAR(bessel_k(m, x).real(), ref, 1e-10 * ref) << m << " " << x;
      EXPECT_NEAR(bessel_k(m, x).imag(), 0.0, 1e-12 * ref);
    }
}

TEST(Bessel, MethodsAgreeOnOverlapBand) {
  BesselEvaluator b;
  double worst = 0.0;
  for (double m : {0.0, 0.5, 1.0, 1.5, 2.5})
    for (double rad : {0.8, 1.0, 1.25})
      for (double th = -1.55; th <= 1.55; th += 0.155) {
        const cplx z = std::polar(rad, th);
        const cplx a = b.by_integral(m, z), c = b.by_symbol(m, z);
        worst = std::max(worst, std::abs(a - c) / std::abs(a));
      }
  EXPECT_LT(worst, 1e-8);
}

TEST(Bessel, NegativeOrderAndDomain) {
  for (cplx z : {cplx(0.4, -0.3), cplx(3.0, 2.0)}) {
    EXPECT_EQ(bessel_k(-1.0, z), bessel_k(1.0, z));
    EXPECT_EQ(bessel_k(-0.5, z), bessel_k(0.5, z));
  }
  EXPECT_THROW(bessel_k(0.0, cplx(0.0, 1.0)), Error);
  EXPECT_THROW(bessel_k(1.0, cplx(-1.0, 0.0)), Error);
}

TEST(Bessel, SmallArgumentBounds) {
  double k1 = 0.0, k0 = 0.0;
  for (double th : {-1.5, -0.8, 0.0, 0.8, 1.5})
    for (double r = 0.01; r <= 1.0; r *= 1.5) {
      const cplx z = std::polar(r, th);
      k1 = std::max(k1, std::abs(bessel_k(1.0, z)) * r);
      if (r <= 0.5) k0 = std::max(k0, std::abs(bessel_k(0.0, z)) / std::abs(std::log(r / 2.0)));
    }
  EXPECT_LT(k1, 2.0);
  EXPECT_LT(k0, 2.0);
}

TEST(Hadamard, ThreeDimensionalClosedForm) {
  const HadamardKernel F(3, 0, 10.0);
  const cplx v = F(1.0);
  EXPECT_NEAR(std::abs(v), std::exp(-1.0) / (4.0 * pi), 1e-14);
  EXPECT_NEAR(std::arg(v), std::arg(std::polar(1.0, 10.0)), 1e-12);
  EXPECT_NEAR(std::abs(v), 0.029275, 1e-6);
  double worst = 0.0;
  for (double lambda : {5.0, 50.0})
    for (double r = 0.05; r <= 1.0 + 1e-12; r += 0.05) {
      const cplx exact = std::exp(cplx(0.0, 1.0) * cplx(lambda, 1.0) * r) / (4.0 * pi * r);
      worst = std::max(worst, std::abs(f_nu(3, 0, r, lambda) - exact) / std::abs(exact));
    }
  EXPECT_LT(worst, 1e-8);
}

TEST(Hadamard, BranchHasPositiveRealPart) {
  for (double lambda : {1.0, 7.5, 300.0}) {
    const HadamardKernel F(2, 0, lambda);
    EXPECT_GT(F.sqrt_z.real(), 0.0);
    EXPECT_LT(std::abs(F.sqrt_z * F.sqrt_z - F.z), 1e-12 * std::abs(F.z));
  }
}

TEST(Hadamard, RecursionLowersOrder) {
  for (int n : {2, 3, 4})
    for (double lambda : {5.0, 10.0}) {
      double worst = 0.0;
      for (double r = 0.1; r <= 1.0 + 1e-12; r += 0.05) {
        const cplx lhs = radial_operator(n, 1, lambda, r);
        const cplx rhs = f_nu(n, 0, r, lambda);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      }
      EXPECT_LT(worst, 1e-4) << n << " " << lambda;
    }
  // nu = 2 against nu = 1, factor nu.
  const cplx lhs = radial_operator(3, 2, 6.0, 0.4);
  EXPECT_LT(std::abs(lhs - 2.0 * f_nu(3, 1, 0.4, 6.0)), 1e-4 * std::abs(lhs));
}

TEST(Hadamard, RegimeSlopes) {
  const auto s3 = regime_slopes(3, 0, 20.0, {8, 16, 32, 64, 128}, 0.3);
  EXPECT_NEAR(s3.near, -1.0, 0.1);
  EXPECT_NEAR(s3.far, 0.0, 0.1);
  const auto s4 = regime_slopes(4, 0, 20.0, {8, 16, 32, 64, 128}, 0.3);
  EXPECT_NEAR(s4.near, -2.0, 0.1);
  EXPECT_NEAR(s4.far, 0.5, 0.1);
}

TEST(Hadamard, Domain) {
  EXPECT_THROW(f_nu(3, 0, 0.0, 5.0), Error);
  EXPECT_THROW(f_nu(3, 0, 0.5, 0.5), Error);
  EXPECT_THROW(f_nu(3, -1, 0.5, 5.0), Error);
}

TEST(Hadamard, TableIsBitwiseReproducible) {
  const auto a = kernel_table(3, 1, {0.1, 0.5}, {5, 50});
  const auto b = kernel_table(3, 1, {0.1, 0.5}, {5, 50});
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.rows.size(), 4u);
}

TEST(KernelL6, SlopeAndDeltaStability) {
  const auto rep = kernel_l6_check({8, 16, 32, 64, 128, 256});
  EXPECT_TRUE(rep.passed()) << rep.json().dump();
  const auto norms = rep.column("l6_norm");
  EXPECT_GT(norms[1], 0.0);
  EXPECT_TRUE(std::isfinite(norms[1]));
  EXPECT_THROW(kernel_l6_check({8, 16, 32}), Error);
}

TEST(Remainder, AmplitudeControlAndCancellation) {
  RemainderOptions o;
  const auto rep = remainder_scale_check(o);
  EXPECT_NEAR(rep.find_check("control slope")->measured, 0.5, 1e-3);
  EXPECT_TRUE(rep.find_check("phase slope below amplitude")->pass());
  EXPECT_EQ(annulus_bump(0.2, 0.25, 0.5), 0.0);
  EXPECT_EQ(annulus_bump(0.5, 0.25, 0.5), 0.0);
  EXPECT_EQ(annulus_bump(0.6, 0.25, 0.5), 0.0);
  EXPECT_GT(annulus_bump(0.3, 0.25, 0.5), 0.0);
}
