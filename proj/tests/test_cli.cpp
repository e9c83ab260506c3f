#include "srsm/cli.hpp"

#include "srsm/config.hpp"
#include "srsm/persist.hpp"
#include "srsm/util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace srsm;
namespace fs = std::filesystem;

namespace {

const CliOverrides quiet{false, 0, -1, true};

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("srsm_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Tiny benchmark run that finishes in well under a second.
std::string fast_config(const fs::path& out_dir, std::uint64_t seed = 5) {
  return std::string(R"({
    "preset": "custom",
    "space": {"variables": [
      {"name": "x0", "kind": "continuous", "lower": -2, "upper": 2},
      {"name": "x1", "kind": "continuous", "lower": -2, "upper": 2}
    ]},
    "baseline": {"x0": 1.5, "x1": 1.5},
    "evaluator": {"type": "benchmark", "function": "sphere"},
    "objective": {"kind": "scalar", "response": "objective"},
    "sampler": {"samples_per_iteration": 12},
    "optimizer": {"population": 24, "generations": 30},
    "termination": {"max_iterations": 6},
    "seed": )") +
         std::to_string(seed) + R"(, "output_dir": ")" + out_dir.string() + "\"}";
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config_in.json";
  write_text_file(path.string(), text);
  return path;
}

} // namespace

TEST_CASE("init writes four self-validating templates") {
  const auto dir = temp_dir("init");
  REQUIRE(cmd_init(dir.string(), quiet) == 0);
  for (const std::string name :
       {"bone_inferior", "bone_superior", "single_articulation", "dual_articulation"}) {
    const fs::path file = dir / (name + ".json");
    REQUIRE_MESSAGE(fs::exists(file), file.string());
    const auto cfg = load_run_config(file);  // throws if invalid
    CHECK(cfg.preset == name);
  }
}

TEST_CASE("run produces the full artifact set") {
  const auto dir = temp_dir("run");
  const auto cfg_path = write_config(dir, fast_config(dir / "out"));
  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);

  CHECK(fs::exists(dir / "out" / "config.json"));
  CHECK(fs::exists(dir / "out" / "results" / "history.csv"));
  CHECK(fs::exists(dir / "out" / "results" / "best_design.json"));
  CHECK(fs::exists(dir / "out" / "results" / "convergence.svg"));
  CHECK(fs::exists(dir / "out" / "state" / "run.json"));
  CHECK(fs::exists(dir / "out" / "state" / "iter_1.json"));

  // history row count = iterations + header.
  const auto text = read_text_file((dir / "out" / "results" / "history.csv").string());
  const auto records = load_iterations(dir / "out");
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == records.size() + 1);

  // best_design values lie inside the bounds.
  const auto cfg = load_run_config(dir / "out" / "config.json");
  const auto best =
      nlohmann::json::parse(read_text_file((dir / "out" / "results" / "best_design.json").string()));
  for (const auto& v : cfg.space.variables) {
    if (v.is_dependent()) continue;
    const double value = best.at("values").at(v.name).get<double>();
    CHECK(value >= v.lower - 1e-9);
    CHECK(value <= v.upper + 1e-9);
  }
}

TEST_CASE("report recomputes and verifies the persisted run") {
  const auto dir = temp_dir("report");
  const auto cfg_path = write_config(dir, fast_config(dir / "out"));
  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);
  CHECK(cmd_report((dir / "out").string(), quiet) == 0);

  SUBCASE("tampered history is an integrity error") {
    const fs::path csv = dir / "out" / "results" / "history.csv";
    auto text = read_text_file(csv.string());
    text.replace(text.find("\n1,") + 3, 1, "9");  // corrupt f_k of iteration 1
    write_text_file(csv.string(), text);
    CHECK(cmd_report((dir / "out").string(), quiet) == 2);
  }
}

TEST_CASE("resume after completion is a no-op") {
  const auto dir = temp_dir("resume_done");
  const auto cfg_path = write_config(dir, fast_config(dir / "out"));
  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);
  const auto before = read_text_file((dir / "out" / "results" / "history.csv").string());
  CHECK(cmd_resume((dir / "out").string(), quiet) == 0);
  const auto after = read_text_file((dir / "out" / "results" / "history.csv").string());
  CHECK(before == after);
}

TEST_CASE("doe calibration writes a derived config that re-validates") {
  const auto dir = temp_dir("doe");
  auto cfg = parse_run_config(template_config("bone_inferior"));
  cfg.output_dir = (dir / "out").string();
  cfg.settings.samples_per_iteration = 20;
  const fs::path cfg_path = dir / "bone.json";
  write_text_file(cfg_path.string(), run_config_to_json(cfg));

  REQUIRE(cmd_doe(cfg_path.string(), 100, quiet) == 0);
  const fs::path derived = dir / "bone_calibrated.json";
  REQUIRE(fs::exists(derived));
  const auto dcfg = load_run_config(derived);
  CHECK(dcfg.w1 == 1.0);
  CHECK(dcfg.w2 > 0.0);
  CHECK(dcfg.w2 != 1.0);
}

TEST_CASE("sobol emits sensitivity tables from the final metamodels") {
  const auto dir = temp_dir("sobol");
  const auto cfg_path = write_config(dir, fast_config(dir / "out"));
  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);
  REQUIRE(cmd_sobol((dir / "out").string(), 256, quiet) == 0);
  CHECK(fs::exists(dir / "out" / "results" / "sensitivity.csv"));
  CHECK(fs::exists(dir / "out" / "results" / "sobol_ranking.csv"));
  const auto csv = read_text_file((dir / "out" / "results" / "sensitivity.csv").string());
  CHECK(csv.find("x0,objective,") != std::string::npos);

  // Report picks the ranking up.
  CHECK(cmd_report((dir / "out").string(), quiet) == 0);
}

TEST_CASE("improvement formatting matches the reporting style") {
  // baseline 1.0 -> best 0.854 is a 14.6% improvement.
  const double percent = (1.0 - 0.854) / 1.0 * 100.0;
  CHECK(improvement_line(percent) == "improvement 14.6%");
  CHECK(improvement_line(0.0) == "improvement 0.0%");
}

TEST_CASE("split-then-combine orchestrates both interfaces and merges the best designs") {
  const auto dir = temp_dir("split");
  auto cfg = parse_run_config(template_config("bone_inferior"));
  cfg.mode = "split_then_combine";
  cfg.output_dir = (dir / "out").string();
  cfg.settings.samples_per_iteration = 15;
  cfg.settings.optimizer.population = 24;
  cfg.settings.optimizer.generations = 30;
  cfg.settings.termination.max_iterations = 3;
  cfg.settings.seed = 12;
  const fs::path cfg_path = dir / "split.json";
  write_text_file(cfg_path.string(), run_config_to_json(cfg));

  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);
  CHECK(fs::exists(dir / "out" / "inferior" / "results" / "best_design.json"));
  CHECK(fs::exists(dir / "out" / "superior" / "results" / "best_design.json"));
  const auto combined = nlohmann::json::parse(
      read_text_file((dir / "out" / "results" / "combined.json").string()));
  CHECK(combined.at("combined_objective").get<double>() > 0.0);
  CHECK(combined.at("combined_objective").get<double>() <
        combined.at("baseline_objective").get<double>());
}

TEST_CASE("dual articulation profile runs end to end on a reduced budget") {
  const auto dir = temp_dir("dual");
  auto cfg = parse_run_config(template_config("dual_articulation"));
  cfg.output_dir = (dir / "out").string();
  cfg.settings.samples_per_iteration = 25;
  cfg.settings.optimizer.population = 30;
  cfg.settings.optimizer.generations = 40;
  cfg.settings.termination.max_iterations = 3;
  cfg.settings.seed = 8;
  cfg.settings.parallelism = 4;
  const fs::path cfg_path = dir / "dual.json";
  write_text_file(cfg_path.string(), run_config_to_json(cfg));

  REQUIRE(cmd_run(cfg_path.string(), quiet) == 0);
  const auto best = nlohmann::json::parse(
      read_text_file((dir / "out" / "results" / "best_design.json").string()));
  CHECK(best.at("feasible").get<bool>());
  CHECK(best.at("objective").get<double>() < best.at("baseline_objective").get<double>());
  CHECK(cmd_report((dir / "out").string(), quiet) == 0);
}

TEST_CASE("invalid config exits nonzero through the binary") {
  const char* bin = std::getenv("SRSMOPT_BIN");
  if (!bin) return;  // only exercised under ctest

  const auto dir = temp_dir("bin");
  const fs::path bad = dir / "bad.json";
  write_text_file(bad.string(), "{\"preset\": \"nope\"}");
  const std::string cmd = std::string(bin) + " run --config " + bad.string() + " 2>/dev/null";
  const int code = std::system(cmd.c_str());
  CHECK(code != 0);

  const std::string help = std::string(bin) + " --help > /dev/null";
  CHECK(std::system(help.c_str()) == 0);
}
