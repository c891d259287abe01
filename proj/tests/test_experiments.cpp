#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlab/experiments/config.hpp"
#include "qlab/experiments/runner.hpp"

using namespace qlab;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<Diagnostic>& d, const std::string& text) {
  for (const auto& x : d)
    if (x.str().find(text) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, SectionsAliasesAndDefaults) {
  auto c = Config::parse("experiment = heat\n[manifold]\nn = 3 # comment\n\n[grid]\nt = 0.1, 0.2\n");
  EXPECT_TRUE(c.validate().empty());
  EXPECT_EQ(c.integer("manifold.n"), 3);
  EXPECT_EQ(c.reals("grid.t"), (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c.integer("truncation.K"), 64);
  EXPECT_EQ(c.text("potential.shift"), "auto");
  c.set("K", "12");
  c.set("manifold.n", "2");
  EXPECT_EQ(c.integer("truncation.K"), 12);
  EXPECT_EQ(c.integer("manifold.n"), 2);
}

TEST(Config, ListsAcceptGeometricAndCritical) {
  auto c = Config::parse("experiment = projector-norms\n[grid]\nlambdas = geometric:10:40\np = 2, pc, inf\n");
  EXPECT_EQ(c.reals("grid.lambdas"), geometric_grid(10, 40));
  const auto p = c.reals("grid.p");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_TRUE(std::isnan(p[1]));
  EXPECT_TRUE(std::isinf(p[2]));
}

TEST(Config, RejectsUnknownKeysWithLineNumbers) {
  auto c = Config::parse("experiment = heat\n[grid]\ntt = 0.1\n[manifold]\nkind = cube\n");
  const auto d = c.validate();
  ASSERT_EQ(d.size(), 2u);
  EXPECT_TRUE(mentions(d, "line 3: grid.tt: unknown key"));
  EXPECT_TRUE(mentions(d, "line 5: manifold.kind: invalid value 'cube'"));
  auto e = Config::parse("experiment = heat\n");
  e.set("Kk", "3");
  EXPECT_TRUE(mentions(e.validate(), "Kk: unknown key"));
}

TEST(Config, MalformedLinesAndMissingExperiment) {
  const auto d = Config::parse("[grid\nK 3\n").validate();
  EXPECT_TRUE(mentions(d, "line 1: malformed section header"));
  EXPECT_TRUE(mentions(d, "line 2: expected key = value"));
  EXPECT_TRUE(mentions(d, "experiment: missing"));
  EXPECT_TRUE(mentions(Config::parse("experiment = heat\nseed = 1\nseed = 2\n").validate(), "duplicate key"));
}

TEST(Config, SemanticDiagnostics) {
  auto c = Config::parse("experiment = projector-norms\n[truncation]\nK = 0\n");
  EXPECT_TRUE(mentions(c.validate(), "truncation too small"));
  auto d = Config::parse("experiment = divergent-quasimode\n[manifold]\nn = 3\n");
  EXPECT_TRUE(mentions(d.validate(), "requires n >= 4"));
  auto e = Config::parse("experiment = resolvent-probe\n");
  EXPECT_TRUE(mentions(e.validate(), "3-torus"));
  auto f = Config::parse("experiment = heat\n[potential]\nshift = lots\n");
  EXPECT_TRUE(mentions(f.validate(), "expected auto or a number"));
}

TEST(Config, UnknownExperimentListsNames) {
  auto c = Config::parse("experiment = nope\n");
  const auto d = c.validate();
  ASSERT_FALSE(d.empty());
  EXPECT_NE(d.front().message.find("strichartz"), std::string::npos);
  EXPECT_THROW(experiment_function("nope"), Error);
  try {
    experiment_function("nope");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("resolvent-probe"), std::string::npos);
  }
}

TEST(Config, EveryExperimentIsRegistered) {
  for (const auto& n : experiment_names()) EXPECT_NE(experiment_function(n), nullptr) << n;
}

TEST(Runner, SpectrumIsExactLaplaceSpectrum) {
  auto c = Config::parse("experiment = spectrum\n[potential]\nV = 0\n[truncation]\nK = 8\n");
  const auto run = run_experiment(c);
  const auto ev = run.report.column("eigenvalue");
  ASSERT_EQ(ev.size(), 9u);
  for (int k = 0; k <= 8; ++k) EXPECT_NEAR(ev[k], k * (k + 1.0), 1e-10);
  EXPECT_TRUE(run.report.passed());
}

TEST(Runner, CounterexampleSummary) {
  auto c = Config::parse("experiment = counterexample\n[manifold]\nn = 3\n[truncation]\nK = 32\n");
  const auto run = run_experiment(c);
  EXPECT_LT(run.report.summary["residual_max"].get<double>(), 1e-8);
  EXPECT_EQ(run.report.summary["kato_verdict"].get<std::string>(), "not-in-Kato");
  EXPECT_TRUE(run.report.passed());
}

TEST(Runner, InvalidConfigRaisesConfigError) {
  auto c = Config::parse("experiment = heat\nbogus = 1\n");
  try {
    run_experiment(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Runner, WritesCsvAndJsonAtomically) {
  const fs::path dir = fs::temp_directory_path() / "qlab_runner_test";
  fs::remove_all(dir);
  auto c = Config::parse("experiment = weyl\n[potential]\nshift = 0\n[truncation]\nK = 24\n[grid]\nmu = 5, 10, 20\n");
  auto run = run_experiment(c);
  write_run(c, run, dir);
  EXPECT_EQ(run.csv_path, dir / "weyl.csv");
  const std::string csv = slurp(run.csv_path);
  EXPECT_EQ(csv, run.report.csv());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mu,sum,weyl,ratio");
  const auto j = Json::parse(slurp(run.json_path));
  EXPECT_EQ(j["config"]["truncation.K"], "24");
  EXPECT_EQ(j["config"]["experiment"], "weyl");
  EXPECT_EQ(j["version"], version_string());
  EXPECT_TRUE(j["runtime_seconds"].is_number());
  EXPECT_EQ(j["verdict"], "pass");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos);
  }
  EXPECT_EQ(files, 2u);
  fs::remove_all(dir);
}

TEST(Runner, OutputStem) {
  auto c = Config::parse("experiment = heat\n", "configs/heat-small.conf");
  EXPECT_EQ(output_stem(c), "heat-small");
  c.set("prefix", "mine");
  EXPECT_EQ(output_stem(c), "mine");
  EXPECT_EQ(output_stem(Config::parse("experiment = heat\n")), "heat");
}

TEST(Runner, SeededBatteryRunsAreByteIdentical) {
  const std::string text =
      "experiment = square-function\n[potential]\nV = counterexample-cut:0.3\n[truncation]\nK = 32\n"
      "[grid]\nlambdas = 2, 4, 8\nr = 4\n[probe]\nbattery = random-band\n";
  const auto a = run_experiment(Config::parse(text)).report.csv();
  const auto b = run_experiment(Config::parse(text)).report.csv();
  EXPECT_EQ(a, b);
  auto c = Config::parse(text);
  c.set("seed", "7");
  EXPECT_NE(run_experiment(c).report.csv(), a);
}
