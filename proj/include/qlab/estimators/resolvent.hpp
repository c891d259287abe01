#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/smooth.hpp"
#include "qlab/estimators/exponents.hpp"
#include "qlab/estimators/fit.hpp"
#include "qlab/report/report.hpp"

namespace qlab {

namespace detail {

/// Smallest even N >= m whose prime factors are 2, 3, 5.
inline int fft_size(int m) {
  for (int N = std::max(2, m + (m & 1));; N += 2) {
    int r = N;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return N;
  }
}

/// Periodic complex field on the uniform grid of T^3 with an FFTW inverse
/// transform g(x) = sum_m ghat(m) e^{i m.x}.
class TorusField {
 public:
  explicit TorusField(int N) : N_(N), size_(static_cast<std::size_t>(N) * N * N) {
    data_ = fftw_alloc_complex(size_);
    plan_ = fftw_plan_dft_3d(N, N, N, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_) raise(ErrorKind::numeric, "estimators", "FFTW plan creation failed");
  }
  ~TorusField() {
    fftw_destroy_plan(plan_);
    fftw_free(data_);
  }
  TorusField(const TorusField&) = delete;
  TorusField& operator=(const TorusField&) = delete;

  int N() const { return N_; }

  /// Fills Fourier coefficients from a function of the integer frequency.
  void set_spectrum(const std::function<std::complex<double>(int, int, int)>& ghat) {
    std::size_t i = 0;
    for (int a = 0; a < N_; ++a)
      for (int b = 0; b < N_; ++b)
        for (int c = 0; c < N_; ++c, ++i) {
          const auto v = ghat(freq(a), freq(b), freq(c));
          data_[i][0] = v.real();
          data_[i][1] = v.imag();
        }
  }

  void to_space() { fftw_execute(plan_); }

  /// (sum |g|^p (2pi/N)^3)^(1/p), scaled by the max for stability.
  double lp(double p) const {
    double mx = 0.0;
    for (std::size_t i = 0; i < size_; ++i) mx = std::max(mx, std::hypot(data_[i][0], data_[i][1]));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < size_; ++i) s += std::pow(std::hypot(data_[i][0], data_[i][1]) / mx, p);
    const double h = 2.0 * std::numbers::pi / N_;
    return mx * std::pow(s * h * h * h, 1.0 / p);
  }

 private:
  int freq(int a) const { return a <= N_ / 2 ? a : a - N_; }

  int N_;
  std::size_t size_;
  fftw_complex* data_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// ||R g||_{p'} / ||g||_p for R = (-Delta - (lambda+i)^2)^{-1} on T^3,
/// for a test function given by its Fourier coefficients supported in
/// |m| <= support, sampled on an N^3 grid with N >= oversample (support + 1).
inline int torus_grid_size(double support, double oversample) {
  return detail::fft_size(std::max(16, static_cast<int>(std::ceil(oversample * (support + 1.0)))));
}

inline double torus_resolvent_ratio(double lambda, const std::function<double(double)>& ghat_radial, double support,
                                    double oversample = 2.5) {
  const auto pair = resolvent_pair(3);
  const int N = torus_grid_size(support, oversample);
  const std::complex<double> z = (lambda + std::complex<double>(0, 1)) * (lambda + std::complex<double>(0, 1));
  detail::TorusField g(N), Rg(N);
  g.set_spectrum([&](int a, int b, int c) { return std::complex<double>(ghat_radial(std::sqrt(double(a * a + b * b + c * c)))); });
  Rg.set_spectrum([&](int a, int b, int c) {
    const double m2 = a * a + b * b + c * c;
    return ghat_radial(std::sqrt(m2)) / (m2 - z);
  });
  g.to_space();
  Rg.to_space();
  return Rg.lp(pair.p_dual) / g.lp(pair.p);
}

/// Closed form for a single exponential e^{i m.x}: |1/(|m|^2 - (lambda+i)^2)| (2pi)^{-2}.
inline double torus_single_mode_ratio(double lambda, double m2) {
  const std::complex<double> z = (lambda + std::complex<double>(0, 1)) * (lambda + std::complex<double>(0, 1));
  const auto pair = resolvent_pair(3);
  return std::abs(1.0 / (m2 - z)) * std::pow(2.0 * std::numbers::pi, 3.0 * (1.0 / pair.p_dual - 1.0 / pair.p));
}

struct ResolventProbeOptions {
  int n = 3;
  std::vector<double> lambdas;
  double tolerance = 0.1;
  double residual_cap = 0.25;
  double oversample = 2.5;  // grid points per unit of frequency support, per axis
};

/// Lower bounds on ||(-Delta-(lambda+i)^2)^{-1}||_{L^p -> L^p'} on T^3 from
/// point-concentrated, sharp-shell and smooth-shell test functions.
inline ExperimentReport uniform_resolvent_probe(const ResolventProbeOptions& opt) {
  detail::require(opt.n == 3, ErrorKind::config, "estimators", "resolvent probe is implemented on T^3 only (n = 3)");
  detail::require(opt.lambdas.size() >= 4, ErrorKind::config, "estimators", "resolvent probe needs at least 4 lambdas");
  const auto pair = resolvent_pair(opt.n);
  ExperimentReport rep;
  rep.experiment = "resolvent-probe";
  rep.columns = {"lambda", "family", "grid", "ratio", "best"};
  std::vector<double> best;
  for (double lambda : opt.lambdas) {
    detail::require(lambda >= 1.0, ErrorKind::config, "estimators", "resolvent probe needs lambda >= 1");
    struct Family {
      const char* name;
      std::function<double(double)> ghat;
      double support;
    };
    const std::vector<Family> families = {
        {"point", [lambda](double r) { return smooth_step(r / lambda); }, lambda},
        {"shell", [lambda](double r) { return (r >= lambda && r <= lambda + 1.0) ? 1.0 : 0.0; }, lambda + 1.0},
        {"smooth-shell",
         [lambda](double r) { return std::abs(r - lambda) <= 4.0 ? std::exp(-(r - lambda) * (r - lambda)) : 0.0; },
         lambda + 4.0},
    };
    std::vector<double> ratios;
    double b = 0.0;
    for (const auto& f : families) {
      ratios.push_back(torus_resolvent_ratio(lambda, f.ghat, f.support, opt.oversample));
      b = std::max(b, ratios.back());
    }
    for (std::size_t k = 0; k < families.size(); ++k) {
      const int N = torus_grid_size(families[k].support, opt.oversample);
      rep.add_row({lambda, std::string(families[k].name), static_cast<long long>(N), ratios[k], b});
    }
    best.push_back(b);
  }
  const auto fit = fit_exponent(opt.lambdas, best);
  rep.summary["p"] = pair.p;
  rep.summary["p_dual"] = pair.p_dual;
  rep.summary["fit"] = fit_json(fit);
  rep.summary["target_slope"] = 0.0;
  rep.summary["tolerance"] = opt.tolerance;
  rep.checks.push_back(slope_check("no-growth slope", fit, 0.0, opt.tolerance, opt.residual_cap));
  return rep;
}

}  // namespace qlab
