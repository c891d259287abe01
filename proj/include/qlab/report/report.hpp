#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <string>
#include <unistd.h>
#include <variant>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/estimators/fit.hpp"

namespace qlab {

using Json = nlohmann::ordered_json;

/// JSON has no infinities or NaN: those become strings.
inline Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Pass if lo <= measured <= hi. A check that is not emitted (for example a
/// slope whose fit residual exceeds its cap) never passes.
struct Check {
  std::string name;
  double measured = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool emitted = true;
  std::string note;

  bool pass() const { return emitted && measured >= lo && measured <= hi; }
  std::string status() const { return !emitted ? "not-emitted" : (pass() ? "pass" : "fail"); }

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["measured"] = json_number(measured);
    j["lo"] = json_number(lo);
    j["hi"] = json_number(hi);
    j["status"] = status();
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

/// |slope - target| <= tol, emitted only when the fit residual is below cap.
inline Check slope_check(std::string name, const SlopeFit& f, double target, double tol, double residual_cap) {
  Check c{std::move(name), f.slope, target - tol, target + tol, f.residual < residual_cap, {}};
  if (!c.emitted) c.note = "fit residual " + format_double(f.residual) + " above cap " + format_double(residual_cap);
  return c;
}

inline Json fit_json(const SlopeFit& f) {
  Json j;
  j["slope"] = json_number(f.slope);
  j["intercept"] = json_number(f.intercept);
  j["residual"] = json_number(f.residual);
  j["points"] = f.points;
  return j;
}

/// Tabular result of one experiment plus summary fields and checks.
struct ExperimentReport {
  using Cell = std::variant<long long, double, std::string>;

  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json summary = Json::object();
  std::vector<Check> checks;

  void add_row(std::vector<Cell> r) {
    detail::require(r.size() == columns.size(), ErrorKind::numeric, "cli-experiments",
                    "report row width does not match columns of " + experiment);
    rows.push_back(std::move(r));
  }

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }

  const Check* find_check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::vector<double> column(const std::string& name) const {
    std::size_t k = 0;
    while (k < columns.size() && columns[k] != name) ++k;
    detail::require(k < columns.size(), ErrorKind::domain, "cli-experiments", "no column " + name);
    std::vector<double> out;
    for (const auto& r : rows) {
      if (const auto* d = std::get_if<double>(&r[k]))
        out.push_back(*d);
      else if (const auto* i = std::get_if<long long>(&r[k]))
        out.push_back(static_cast<double>(*i));
      else
        out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
  }

  std::string csv() const {
    std::string s;
    for (std::size_t k = 0; k < columns.size(); ++k) s += (k ? "," : "") + columns[k];
    s += '\n';
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (k) s += ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                s += format_double(v);
              else if constexpr (std::is_same_v<T, long long>)
                s += std::to_string(v);
              else
                s += v;
            },
            r[k]);
      }
      s += '\n';
    }
    return s;
  }

  Json json() const {
    Json j;
    j["experiment"] = experiment;
    j["summary"] = summary;
    j["checks"] = Json::array();
    for (const auto& c : checks) j["checks"].push_back(c.to_json());
    j["verdict"] = passed() ? "pass" : "fail";
    j["rows"] = rows.size();
    return j;
  }
};

/// Writes content to path via a temporary file in the same directory and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) detail::raise(ErrorKind::io, "cli-experiments", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) detail::raise(ErrorKind::io, "cli-experiments", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    detail::raise(ErrorKind::io, "cli-experiments", "cannot rename into " + path.string());
  }
}

}  // namespace qlab
