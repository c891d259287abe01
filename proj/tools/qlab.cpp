// qlab: run spectral experiments from key-value configs.
//
//   qlab list
//   qlab validate --config FILE [--key value ...]
//   qlab run [EXPERIMENT] [--config FILE] [--key value ...] [--jobs N] [--out DIR]
//   qlab EXPERIMENT [...]            same as run

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "qlab/core/parallel.hpp"
#include "qlab/experiments/config.hpp"
#include "qlab/experiments/runner.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_verdict = 2;

// Applies "--key value" and "--key=value" pairs left over by CLI11.
void apply_overrides(qlab::Config& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string a = extras[i];
    if (a.rfind("--", 0) != 0) {
      cfg.set(a, "");  // records an "unknown key" diagnostic
      continue;
    }
    a = a.substr(2);
    if (const auto eq = a.find('='); eq != std::string::npos) {
      cfg.set(a.substr(0, eq), a.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      cfg.set(a, extras[++i]);
    } else {
      cfg.set(a, "");
    }
  }
}

qlab::Config make_config(const std::string& path, const std::string& experiment, const std::vector<std::string>& extras) {
  qlab::Config cfg = path.empty() ? qlab::Config::parse("", "<command line>") : qlab::Config::load(path);
  if (!experiment.empty()) cfg.set("experiment", experiment);
  apply_overrides(cfg, extras);
  return cfg;
}

int print_diagnostics(const std::vector<qlab::Diagnostic>& diags, const std::string& source) {
  for (const auto& d : diags) std::cerr << source << ": " << d.str() << "\n";
  return diags.empty() ? exit_ok : exit_error;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto& names = qlab::experiment_names();
  if (!args.empty() && std::find(names.begin(), names.end(), args.front()) != names.end())
    args.insert(args.begin(), "run");

  CLI::App app{"qlab: Schroedinger operators on model manifolds, spectral experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qlab::version_string()));

  auto* list = app.add_subcommand("list", "list experiments");

  std::string config_path, experiment, out_dir;
  unsigned jobs = 0;

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "config file");
  validate->add_option("experiment", experiment, "experiment name");
  validate->allow_extras();

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment, "experiment name");
  run->add_option("--config", config_path, "config file");
  run->add_option("--jobs", jobs, "worker thread cap (0: all cores)");
  run->add_option("--out", out_dir, "output directory (QLAB_OUT overrides)");
  run->allow_extras();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_error;
  }

  if (list->parsed()) {
    for (const auto& n : names) std::cout << n << "\n";
    return exit_ok;
  }

  try {
    if (validate->parsed()) {
      const auto cfg = make_config(config_path, experiment, validate->remaining());
      const auto diags = cfg.validate();
      const int rc = print_diagnostics(diags, cfg.source());
      if (rc == exit_ok) std::cout << cfg.source() << ": ok\n";
      return rc;
    }

    const auto cfg = make_config(config_path, experiment, run->remaining());
    if (const auto diags = cfg.validate(); !diags.empty()) return print_diagnostics(diags, cfg.source());
    if (!cfg.has("experiment")) {
      std::cerr << "no experiment given\n";
      return exit_error;
    }
    qlab::set_max_jobs(jobs);
    std::string dir = out_dir.empty() ? cfg.text("output.dir") : out_dir;
    if (const char* env = std::getenv("QLAB_OUT"); env && *env) dir = env;

    auto result = qlab::run_experiment(cfg);
    qlab::write_run(cfg, result, dir);
    for (const auto& c : result.report.checks)
      std::printf("%-12s %-40s %s\n", c.status().c_str(), c.name.c_str(), qlab::format_double(c.measured).c_str());
    std::printf("%s: %s (%.2f s) -> %s\n", cfg.experiment().c_str(), result.report.passed() ? "pass" : "fail",
                result.seconds, result.csv_path.string().c_str());
    return result.report.passed() ? exit_ok : exit_verdict;
  } catch (const qlab::Error& e) {
    std::cerr << "error [" << e.module() << ", " << qlab::to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
}
