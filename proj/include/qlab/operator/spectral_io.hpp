#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "qlab/core/error.hpp"
#include "qlab/operator/spectral.hpp"

namespace qlab {

namespace detail {
inline std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Writes eigenvalues (index,sector,mu,lambda) and eigenvector entries
/// (index,mode,coefficient) as two CSV files; values round-trip exactly.
inline void write_spectrum_csv(const SpectralDecomposition& d, const std::string& values_path,
                               const std::string& vectors_path) {
  std::ofstream ev(values_path), vv(vectors_path);
  if (!ev || !vv) detail::raise(ErrorKind::io, "operator-core", "cannot write spectrum files");
  ev << "index,sector,mu,lambda,shift\n";
  vv << "index,mode,coefficient\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    ev << i << ',' << d.sector[i] << ',' << detail::exact(d.mu[i]) << ',' << detail::exact(d.lambda[i]) << ','
       << detail::exact(d.shift) << '\n';
    const auto& idx = d.basis->sectors()[d.sector[i]];
    for (std::size_t a = 0; a < idx.size(); ++a)
      vv << i << ',' << idx[a] << ',' << detail::exact(d.coef[i][a]) << '\n';
  }
}

/// Reads files written by write_spectrum_csv for the same basis.
inline SpectralDecomposition read_spectrum_csv(std::shared_ptr<const Basis> basis, const std::string& values_path,
                                               const std::string& vectors_path) {
  std::ifstream ev(values_path), vv(vectors_path);
  if (!ev || !vv) detail::raise(ErrorKind::io, "operator-core", "cannot read spectrum files");
  SpectralDecomposition d;
  d.basis = basis;
  std::string line;
  std::getline(ev, line);
  while (std::getline(ev, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string f[5];
    for (auto& x : f) std::getline(is, x, ',');
    d.sector.push_back(std::stoi(f[1]));
    d.mu.push_back(std::stod(f[2]));
    d.lambda.push_back(std::stod(f[3]));
    d.shift = std::stod(f[4]);
    d.coef.emplace_back(basis->sectors().at(d.sector.back()).size(), 0.0);
  }
  std::getline(vv, line);
  std::vector<std::size_t> fill(d.size(), 0);
  while (std::getline(vv, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string f[3];
    for (auto& x : f) std::getline(is, x, ',');
    const std::size_t i = std::stoul(f[0]);
    if (i >= d.size() || fill[i] >= d.coef[i].size())
      detail::raise(ErrorKind::io, "operator-core", "spectrum vector file does not match its eigenvalue file");
    d.coef[i][fill[i]++] = std::stod(f[2]);
  }
  return d;
}

}  // namespace qlab
