#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/core/matrix.hpp"
#include "qlab/core/parallel.hpp"
#include "qlab/core/rng.hpp"
#include "qlab/estimators/exponents.hpp"
#include "qlab/geometry/grid_function.hpp"
#include "qlab/operator/multiplier.hpp"

namespace qlab {

/// sum_i a_i v_i at the probe points.
inline std::vector<double> probe_synthesis(const SpectralDecomposition& spec, std::span<const double> a) {
  std::vector<double> out(spec.basis->grid().probes().size(), 0.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (a[i] == 0.0) continue;
    const auto pv = spec.probe_values(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += a[i] * pv[k];
  }
  return out;
}

/// ||sum_i a_i v_i||_p on the grid; for p = inf the probe points count too.
inline double eigen_lp_norm(const SpectralDecomposition& spec, std::span<const double> a, double p) {
  const auto f = spec.synthesize(a);
  double v = lp_norm(spec.basis->grid(), f, p);
  if (std::isinf(p))
    for (double x : probe_synthesis(spec, a)) v = std::max(v, std::abs(x));
  return v;
}

struct QuasimodeParts {
  double lp = 0.0;
  double l2 = 0.0;
  double residual = 0.0;  // ||(H_V - (lambda+i)^2) u||_2
  double ratio = 0.0;
};

/// ||u||_p / (lambda^(sigma-1) ||(H_V-(lambda+i)^2)u||_2 + lambda^sigma ||u||_2)
/// for u = sum_i a_i v_i given by its eigen-coefficients.
inline QuasimodeParts quasimode_ratio_coefficients(const SpectralDecomposition& spec, std::span<const double> a,
                                                   double lambda, double p) {
  detail::require(a.size() == spec.size(), ErrorKind::domain, "estimators", "quasimode: coefficient size mismatch");
  detail::require(lambda >= 1.0, ErrorKind::domain, "estimators", "quasimode ratio needs lambda >= 1");
  const int n = spec.basis->manifold().n;
  const double s = sigma(p, n);
  const std::complex<double> z = (lambda + std::complex<double>(0.0, 1.0)) * (lambda + std::complex<double>(0.0, 1.0));
  QuasimodeParts q;
  double r2 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    l2 += a[i] * a[i];
    r2 += std::norm(spec.mu[i] - z) * a[i] * a[i];
  }
  q.l2 = std::sqrt(l2);
  q.residual = std::sqrt(r2);
  detail::require(q.l2 > 0.0, ErrorKind::domain, "estimators", "quasimode ratio of the zero function");
  q.lp = eigen_lp_norm(spec, a, p);
  q.ratio = q.lp / (std::pow(lambda, s - 1.0) * q.residual + std::pow(lambda, s) * q.l2);
  return q;
}

/// Same for u given on the grid (projected onto the Galerkin span).
inline QuasimodeParts quasimode_ratio(const SpectralDecomposition& spec, std::span<const double> u, double lambda, double p) {
  const auto a = spec.analyze(u);
  return quasimode_ratio_coefficients(spec, a, lambda, p);
}

struct ProjectorNormOptions {
  int restarts = 8;
  int max_iter = 400;
  double tol = 1e-6;
  std::uint64_t seed = 12345;
};

struct ProjectorNorm {
  double lower = 0.0;
  double upper = 0.0;
  bool stagnated = false;
  std::size_t rank = 0;
  int best_restart = -1;
};

/// ||P||_{L^2 -> L^p} for a finite-rank multiplier with real coefficients.
/// p = 2 and p = inf are exact on the grid; otherwise a lower bound from
/// projected gradient ascent over unit coefficient vectors and the upper
/// bound ||P||_{2->inf}^{1-2/p} ||P||_{2->2}^{2/p}.
inline ProjectorNorm projector_norm(const MultiplierOperator& P, double p, const ProjectorNormOptions& opt = {}) {
  detail::require(p >= 2.0, ErrorKind::domain, "estimators", "projector_norm needs p >= 2");
  const auto& spec = *P.spec;
  std::vector<std::size_t> range;
  std::vector<double> m;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P.coef[i] == 0.0) continue;
    detail::require(P.coef[i].imag() == 0.0, ErrorKind::domain, "estimators",
                    "projector_norm supports real multiplier coefficients only");
    range.push_back(i);
    m.push_back(P.coef[i].real());
  }
  ProjectorNorm out;
  out.rank = range.size();
  if (range.empty()) return out;

  double norm2 = 0.0;
  for (double x : m) norm2 = std::max(norm2, std::abs(x));
  if (p == 2.0) {
    out.lower = out.upper = norm2;
    return out;
  }

  const auto& grid = spec.basis->grid();
  const std::size_t G = grid.size(), r = range.size();
  Matrix<double> B(G, r);  // B(x, i) = m_i v_i(x)
  parallel_for(r, [&](std::size_t c) {
    const auto v = spec.values(range[c]);
    for (std::size_t x = 0; x < G; ++x) B(x, c) = m[c] * v[x];
  });
  std::vector<std::vector<double>> probe_rows;
  for (std::size_t c = 0; c < r; ++c) {
    const auto pv = spec.probe_values(range[c]);
    if (probe_rows.empty()) probe_rows.assign(pv.size(), std::vector<double>(r));
    for (std::size_t k = 0; k < pv.size(); ++k) probe_rows[k][c] = m[c] * pv[k];
  }

  // p = inf: sup_x of the l2 norm of the row; keep the two largest rows
  std::vector<std::pair<double, std::vector<double>>> top;
  auto offer = [&](double s2, std::span<const double> row) {
    if (top.size() == 2 && s2 <= top[1].first) return;
    top.emplace_back(s2, std::vector<double>(row.begin(), row.end()));
    std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (top.size() > 2) top.pop_back();
  };
  for (std::size_t x = 0; x < G; ++x) {
    double s = 0.0;
    for (double b : B.row(x)) s += b * b;
    offer(s, B.row(x));
  }
  for (const auto& row : probe_rows) {
    double s = 0.0;
    for (double b : row) s += b * b;
    offer(s, row);
  }
  const double sup = top.front().first;
  const auto best_row = top.front().second;
  const auto second_row = top.back().second;
  const double ninf = std::sqrt(sup);
  if (std::isinf(p)) {
    out.lower = out.upper = ninf;
    return out;
  }
  out.upper = std::pow(ninf, 1.0 - 2.0 / p) * std::pow(norm2, 2.0 / p);

  const auto& w = grid.weights;
  auto objective = [&](const std::vector<double>& a, std::vector<double>* grad) {
    const auto f = multiply(B, std::span<const double>(a));
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
      if (grad) grad->assign(r, 0.0);
      return 0.0;
    }
    double F = 0.0;
    std::vector<double> h(G);
    for (std::size_t x = 0; x < G; ++x) {
      const double t = std::abs(f[x]) / scale;
      const double tp2 = std::pow(t, p - 2.0);
      F += w[x] * tp2 * t * t;
      h[x] = w[x] * tp2 * (f[x] / scale);
    }
    if (grad) *grad = multiply_transposed(B, std::span<const double>(h));
    return scale * std::pow(F, 1.0 / p);
  };
  auto normalize = [](std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    s = std::sqrt(s);
    if (s > 0)
      for (double& x : a) x /= s;
    return s;
  };

  // starts: reproducing kernels at the two largest points, highest azimuthal
  // order, the single eigenfunction with largest p-norm, then seeded random
  std::vector<std::vector<double>> starts;
  starts.push_back(best_row);
  starts.push_back(second_row);
  {
    std::size_t hw = 0;
    int best_order = -1;
    for (std::size_t c = 0; c < r; ++c) {
      const auto& idx = spec.basis->sectors()[spec.sector[range[c]]];
      const int ord = std::abs(spec.basis->mode(idx.front()).order);
      if (ord >= best_order) {
        best_order = ord;
        hw = c;
      }
    }
    std::vector<double> e(r, 0.0);
    e[hw] = 1.0;
    starts.push_back(e);
    double bestv = -1.0;
    std::size_t bi = 0;
    for (std::size_t c = 0; c < r; ++c) {
      std::vector<double> ec(r, 0.0);
      ec[c] = 1.0;
      const double v = objective(ec, nullptr);
      if (v > bestv) {
        bestv = v;
        bi = c;
      }
    }
    std::vector<double> eb(r, 0.0);
    eb[bi] = 1.0;
    starts.push_back(eb);
  }
  for (int k = 0; static_cast<int>(starts.size()) < opt.restarts; ++k) {
    Rng rng(opt.seed + static_cast<std::uint64_t>(k));
    std::vector<double> a(r);
    for (double& x : a) x = rng.normal();
    starts.push_back(a);
  }
  starts.resize(std::max(1, opt.restarts));

  bool any_converged = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    auto a = starts[s];
    if (normalize(a) == 0.0) continue;
    std::vector<double> g;
    double F = objective(a, &g);
    bool converged = false;
    for (int it = 0; it < opt.max_iter && !converged; ++it) {
      double ga = 0.0;
      for (std::size_t c = 0; c < r; ++c) ga += g[c] * a[c];
      for (std::size_t c = 0; c < r; ++c) g[c] -= ga * a[c];
      const double gn = normalize(g);
      if (gn == 0.0) {
        converged = true;
        break;
      }
      bool improved = false;
      for (double t = 4.0; t > 1e-9; t *= 0.5) {
        std::vector<double> b(r);
        for (std::size_t c = 0; c < r; ++c) b[c] = a[c] + t * g[c];
        normalize(b);
        std::vector<double> gb;
        const double Fb = objective(b, &gb);
        if (Fb > F) {
          converged = (Fb - F) < opt.tol * Fb;
          a = std::move(b);
          g = std::move(gb);
          F = Fb;
          improved = true;
          break;
        }
      }
      if (!improved) converged = true;  // no ascent direction left at this resolution
    }
    any_converged = any_converged || converged;
    if (F > out.lower) {
      out.lower = F;
      out.best_restart = static_cast<int>(s);
    }
  }
  out.stagnated = !any_converged;
  return out;
}

}  // namespace qlab
