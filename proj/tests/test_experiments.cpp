#include "doctest.h"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "oscine/experiments.hpp"

using namespace oscine;
namespace fs = std::filesystem;

namespace {
fs::path fresh_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("oscine_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("toml subset: tables, arrays, overrides") {
  const std::string text = R"(
# experiment configuration
experiment = "transport"
seed = 42

[system]
iota = 1.5
omega = [1.0, 1.618033988749895]

[numerics]
grid_m = 1024
dt = 1e-3
)";
  auto toml = TomlLite::parse_string(text);
  CHECK(toml.get_string("experiment", "") == "transport");
  CHECK(toml.get_number("system.iota", 0.0) == doctest::Approx(1.5));
  CHECK(toml.get_array("system.omega", {}).size() == 2);
  CHECK(toml.get_number("seed", 0.0) == doctest::Approx(42.0));
  toml.set_override("system.iota=2.0");
  toml.set_override("output.dir=\"elsewhere\"");
  CHECK(toml.get_number("system.iota", 0.0) == doctest::Approx(2.0));
  const auto cfg = ExperimentConfig::from_toml(toml);
  CHECK(cfg.iota == doctest::Approx(2.0));
  CHECK(cfg.out_dir == "elsewhere");
  CHECK(cfg.seed == 42);
  CHECK_THROWS_AS(TomlLite::parse_string("key"), std::invalid_argument);
  CHECK_THROWS_AS(TomlLite::parse_string("k = [1, 2"), std::invalid_argument);
}

TEST_CASE("unknown experiment is rejected") {
  ExperimentConfig cfg;
  cfg.name = "unheard-of";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("transport experiment runs green and writes artifacts") {
  ExperimentConfig cfg;
  cfg.name = "transport";
  cfg.grid_m = 4096;
  const auto dir = fresh_dir("transport");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK(fs::exists(dir / "norms.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "manifest.json"));
  nlohmann::json rep;
  std::ifstream(dir / "report.json") >> rep;
  CHECK(rep["pass"] == true);
  nlohmann::json man;
  std::ifstream(dir / "manifest.json") >> man;
  CHECK(man["experiment"] == "transport");
  CHECK(man["checksums"].contains("norms.csv"));
  fs::remove_all(dir);
}

TEST_CASE("free experiment classifies as bounded") {
  ExperimentConfig cfg;
  cfg.name = "free";
  cfg.dt = 5e-3;
  cfg.T = 12.0;
  const auto dir = fresh_dir("free");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 0);
  nlohmann::json rep;
  std::ifstream(dir / "report.json") >> rep;
  CHECK(rep["growth"]["class"] == "bounded");
  fs::remove_all(dir);
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  ExperimentConfig cfg;
  cfg.name = "transport";
  cfg.grid_m = 2048;
  const auto d1 = fresh_dir("det1");
  const auto d2 = fresh_dir("det2");
  cfg.out_dir = d1.string();
  CHECK(run_experiment(cfg).exit_code == 0);
  cfg.out_dir = d2.string();
  CHECK(run_experiment(cfg).exit_code == 0);
  CHECK(fnv1a64_file((d1 / "norms.csv").string()) ==
        fnv1a64_file((d2 / "norms.csv").string()));
  CHECK(fnv1a64_file((d1 / "report.json").string()) ==
        fnv1a64_file((d2 / "report.json").string()));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("error path emits a diagnostic file and exit code 1") {
  ExperimentConfig cfg;
  cfg.name = "stark-limit";
  cfg.a = 0.0;  // invalid for the Stark generator
  const auto dir = fresh_dir("err");
  cfg.out_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 1);
  CHECK(fs::exists(dir / "error.json"));
  fs::remove_all(dir);
}
