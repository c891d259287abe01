#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/core/error.hpp"
#include "qlab/estimators/fit.hpp"

namespace qlab {

/// Experiments known to the runner, in listing order.
inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "spectrum",     "kato",          "counterexample", "projector-norms", "quasimode",
      "bochner-riesz", "square-function", "multiplier",   "heat",            "wave-speed",
      "strichartz",   "parametrix",    "weyl",           "divergent-quasimode", "resolvent-probe"};
  return names;
}

enum class KeyType { text, integer, real, real_list, choice, boolean };

struct KeySpec {
  std::string key;    // section.name, or name for top-level keys
  std::string alias;  // short command-line form, may be empty
  KeyType type = KeyType::text;
  std::string fallback;  // default value as text; "" means "experiment default"
  std::vector<std::string> choices;
  std::string doc;
};

/// Every accepted key. Anything else in a config file or on the command
/// line is rejected.
inline const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> s = {
      {"experiment", "", KeyType::choice, "", experiment_names(), "experiment to run"},
      {"seed", "seed", KeyType::integer, "2024", {}, "seed for random batteries"},
      {"manifold.kind", "manifold", KeyType::choice, "sphere-zonal", {"sphere-zonal", "sphere-full-2d", "torus"},
       "model manifold"},
      {"manifold.n", "n", KeyType::integer, "2", {}, "dimension"},
      {"potential.V", "V", KeyType::text, "0", {},
       "potential: counterexample, counterexample-cut:<r>, or an expression in phi"},
      {"potential.shift", "shift", KeyType::text, "auto", {}, "spectral shift N: auto or a number"},
      {"potential.level", "level", KeyType::integer, "5", {}, "pole grading level for singular potentials"},
      {"truncation.K", "K", KeyType::integer, "64", {}, "truncation degree"},
      {"truncation.Ks", "Ks", KeyType::real_list, "64, 128, 256", {}, "truncation ladder (wave-speed)"},
      {"grid.lambdas", "lambdas", KeyType::real_list, "", {}, "frequency grid; list or geometric:<a>:<b>"},
      {"grid.p", "p", KeyType::real_list, "", {}, "Lebesgue exponents; inf allowed, pc means p_c"},
      {"grid.t", "t", KeyType::real_list, "", {}, "times"},
      {"grid.mu", "mu", KeyType::real_list, "", {}, "Weyl thresholds"},
      {"grid.r", "r", KeyType::real_list, "", {}, "square-function and multiplier exponents"},
      {"grid.k_min", "k_min", KeyType::integer, "4", {}, "first dyadic scale (divergent-quasimode)"},
      {"grid.k_max", "k_max", KeyType::integer, "14", {}, "last dyadic scale (divergent-quasimode)"},
      {"probe.battery", "battery", KeyType::choice, "zonal-ladder",
       {"zonal-ladder", "zonal-harmonic", "point-concentrated", "random-band"}, "test-function battery"},
      {"probe.delta", "delta", KeyType::real, "0.6", {}, "Bochner-Riesz index"},
      {"probe.eps", "eps", KeyType::real, "0.25", {}, "divergent-quasimode exponent"},
      {"probe.gamma", "gamma", KeyType::real, "1", {}, "imaginary power of the multiplier (1+xi^2)^{i gamma}"},
      {"probe.cutoff", "cutoff", KeyType::real, "0", {}, "wave mollifier frequency; 0 picks lambda_max / 4"},
      {"probe.radius", "radius", KeyType::real, "0.5", {}, "parametrix disc radius"},
      {"probe.remainder", "remainder", KeyType::boolean, "false", {}, "parametrix: add the remainder probe"},
      {"probe.expect", "expect", KeyType::choice, "any", {"any", "in-Kato", "not-in-Kato"}, "expected Kato verdict"},
      {"tolerance.slope", "tol", KeyType::real, "", {}, "slope tolerance"},
      {"tolerance.residual_cap", "residual_cap", KeyType::real, "", {}, "largest RMS fit residual for an emitted slope"},
      {"output.dir", "", KeyType::text, "results", {}, "output directory"},
      {"output.prefix", "prefix", KeyType::text, "", {}, "output file stem; default is the config file stem, else the experiment name"},
  };
  return s;
}

inline const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_schema())
    if (k.key == key) return &k;
  return nullptr;
}

/// Full key for a dotted key or a command-line alias, or "" if unknown.
inline std::string resolve_key(const std::string& name) {
  for (const auto& k : config_schema())
    if (k.key == name || (!k.alias.empty() && k.alias == name)) return k.key;
  return {};
}

struct Diagnostic {
  int line = 0;  // 0 when not tied to a file line
  std::string key;
  std::string message;

  std::string str() const {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!key.empty()) s += key + ": ";
    return s + message;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

inline std::optional<long long> parse_integer(const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

// "a, b, c" or "geometric:<a>:<b>" (a 2^{j/2}). "pc" is kept as NaN and
// resolved by the experiment.
inline std::optional<std::vector<double>> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  std::vector<double> out;
  if (t.empty()) return out;
  if (t.rfind("geometric:", 0) == 0) {
    const auto rest = t.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const auto a = parse_real(rest.substr(0, colon)), b = parse_real(rest.substr(colon + 1));
    if (!a || !b || !(*a > 0.0) || !(*b >= *a) || !std::isfinite(*b)) return std::nullopt;
    return geometric_grid(*a, *b);
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item) == "pc") {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const auto v = parse_real(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

}  // namespace detail

/// Flat key-value configuration with [sections]. Values are kept as text and
/// typed on access; validate() checks every key against the schema.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>") {
    Config c;
    c.source_ = source;
    c.text_ = text;
    std::stringstream ss(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(ss, raw)) {
      ++line;
      std::string s = raw;
      if (const auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
      s = detail::trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          c.parse_errors_.push_back({line, {}, "malformed section header"});
          continue;
        }
        section = detail::trim(s.substr(1, s.size() - 2));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        c.parse_errors_.push_back({line, {}, "expected key = value"});
        continue;
      }
      const std::string name = detail::trim(s.substr(0, eq));
      const std::string key = section.empty() ? name : section + "." + name;
      if (c.values_.count(key)) c.parse_errors_.push_back({line, key, "duplicate key"});
      c.values_[key] = detail::trim(s.substr(eq + 1));
      c.lines_[key] = line;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::raise(ErrorKind::io, "cli-experiments", "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  /// Command-line override; `name` may be a full key or an alias.
  void set(const std::string& name, const std::string& value) {
    const std::string key = resolve_key(name);
    if (key.empty()) {
      parse_errors_.push_back({0, name, "unknown key"});
      return;
    }
    values_[key] = value;
    lines_.erase(key);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) const {
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    const KeySpec* k = find_key(key);
    detail::require(k != nullptr, ErrorKind::config, "cli-experiments", "unknown key " + key);
    return k->fallback;
  }

  long long integer(const std::string& key) const {
    const auto v = detail::parse_integer(text(key));
    if (!v) detail::raise(ErrorKind::config, "cli-experiments", key + ": expected an integer");
    return *v;
  }

  double real(const std::string& key) const {
    const auto v = detail::parse_real(text(key));
    if (!v) detail::raise(ErrorKind::config, "cli-experiments", key + ": expected a number");
    return *v;
  }

  bool boolean(const std::string& key) const {
    const auto t = text(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    detail::raise(ErrorKind::config, "cli-experiments", key + ": expected true or false");
  }

  /// The list, or `fallback` when the key is unset or empty.
  std::vector<double> reals(const std::string& key, std::vector<double> fallback = {}) const {
    const auto v = detail::parse_real_list(text(key));
    if (!v) detail::raise(ErrorKind::config, "cli-experiments", key + ": expected a list of numbers");
    return v->empty() ? fallback : *v;
  }

  std::string experiment() const { return text("experiment"); }

  /// Diagnostics for every problem found; empty means valid.
  std::vector<Diagnostic> validate() const {
    std::vector<Diagnostic> out = parse_errors_;
    for (const auto& [key, value] : values_) {
      const KeySpec* k = find_key(key);
      const int line = line_of(key);
      if (!k) {
        out.push_back({line, key, "unknown key"});
        continue;
      }
      bool ok = true;
      switch (k->type) {
        case KeyType::integer: ok = detail::parse_integer(value).has_value(); break;
        case KeyType::real: ok = value.empty() || detail::parse_real(value).has_value(); break;
        case KeyType::real_list: ok = detail::parse_real_list(value).has_value(); break;
        case KeyType::boolean:
          ok = value == "true" || value == "false" || value == "1" || value == "0" || value == "yes" || value == "no";
          break;
        case KeyType::choice: ok = std::find(k->choices.begin(), k->choices.end(), value) != k->choices.end(); break;
        case KeyType::text: break;
      }
      if (!ok) {
        std::string msg = "invalid value '" + value + "'";
        if (k->type == KeyType::choice) {
          msg += "; expected one of:";
          for (const auto& c : k->choices) msg += " " + c;
        }
        out.push_back({line, key, msg});
      }
    }
    if (!has("experiment")) {
      std::string msg = "missing; expected one of:";
      for (const auto& c : experiment_names()) msg += " " + c;
      out.push_back({0, "experiment", msg});
    }
    if (!out.empty()) return out;
    semantic_checks(out);
    return out;
  }

  /// Effective values of every schema key, in schema order.
  std::vector<std::pair<std::string, std::string>> effective() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : config_schema()) out.emplace_back(k.key, text(k.key));
    return out;
  }

  const std::string& source() const { return source_; }
  const std::string& source_text() const { return text_; }

 private:
  int line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  void semantic_checks(std::vector<Diagnostic>& out) const {
    const std::string e = experiment();
    const long long n = integer("manifold.n");
    const long long K = integer("truncation.K");
    const std::string kind = text("manifold.kind");
    auto add = [&](const std::string& key, const std::string& msg) { out.push_back({line_of(key), key, msg}); };
    if (n < 2 || n > 16) add("manifold.n", "dimension must be in [2, 16]");
    if (kind == "sphere-full-2d" && n != 2) add("manifold.n", "sphere-full-2d requires n = 2");
    if (kind == "torus" && n > 3) add("manifold.n", "torus requires n <= 3");
    if (K < 0) add("truncation.K", "must be non-negative");
    const auto shift = text("potential.shift");
    if (shift != "auto" && !detail::parse_real(shift)) add("potential.shift", "expected auto or a number");

    const auto lambdas = reals("grid.lambdas");
    for (double l : lambdas)
      if (!(l > 0.0) || !std::isfinite(l)) add("grid.lambdas", "frequencies must be positive and finite");
    for (double p : reals("grid.p"))
      if (!std::isnan(p) && !(p >= 1.0)) add("grid.p", "exponents must be >= 1");

    const bool spectral = e == "spectrum" || e == "projector-norms" || e == "quasimode" || e == "bochner-riesz" ||
                          e == "square-function" || e == "multiplier" || e == "heat" || e == "strichartz" ||
                          e == "weyl";
    if (spectral && K < 1) add("truncation.K", "truncation too small");
    if (e == "projector-norms" || e == "quasimode" || e == "bochner-riesz") {
      double top = 0.0;
      for (double l : lambdas) top = std::max(top, l);
      if (K < 1 || top + 2.0 > static_cast<double>(K)) add("truncation.K", "truncation too small for the frequency grid");
    }
    if (e == "wave-speed")
      for (double k : reals("truncation.Ks"))
        if (!(k >= 8.0)) add("truncation.Ks", "truncation too small");
    if (e == "divergent-quasimode" && n < 4) add("manifold.n", "divergent-quasimode requires n >= 4");
    if (e == "resolvent-probe" && (kind != "torus" || n != 3))
      add("manifold.kind", "resolvent-probe runs on the 3-torus (kind = torus, n = 3)");
    if (e == "parametrix" && lambdas.size() > 0 && lambdas.size() < 4) add("grid.lambdas", "at least 4 frequencies");
  }

  std::string source_;
  std::string text_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::vector<Diagnostic> parse_errors_;
};

}  // namespace qlab
