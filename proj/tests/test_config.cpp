#include "srsm/config.hpp"

#include "srsm/persist.hpp"
#include "srsm/util.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

using namespace srsm;
namespace fs = std::filesystem;

namespace {

std::string minimal_benchmark_config() {
  return R"({
    "preset": "custom",
    "space": {"variables": [
      {"name": "x0", "kind": "continuous", "lower": -5, "upper": 5},
      {"name": "x1", "kind": "continuous", "lower": -5, "upper": 5}
    ]},
    "evaluator": {"type": "benchmark", "function": "sphere"},
    "objective": {"kind": "scalar", "response": "objective"},
    "sampler": {"samples_per_iteration": 10},
    "seed": 7,
    "output_dir": "run_x"
  })";
}

} // namespace

TEST_CASE("templates validate and carry the documented profiles") {
  for (const std::string problem :
       {"bone_inferior", "bone_superior", "single_articulation", "dual_articulation"}) {
    const auto text = template_config(problem);
    const auto cfg = parse_run_config(text, problem);
    CHECK(cfg.preset == problem);
    CHECK(cfg.settings.optimizer.population == 100);
    CHECK(cfg.settings.optimizer.generations == 250);
    CHECK(cfg.settings.termination.tol_p == 0.01);
    CHECK(cfg.settings.termination.tol_f == 0.01);
    CHECK(cfg.settings.termination.max_iterations == 50);
  }
  CHECK(parse_run_config(template_config("single_articulation")).settings.samples_per_iteration ==
        30);
  CHECK(parse_run_config(template_config("dual_articulation")).settings.samples_per_iteration ==
        100);
  CHECK(parse_run_config(template_config("bone_inferior")).settings.samples_per_iteration == 125);
  CHECK(parse_run_config(template_config("bone_superior")).settings.samples_per_iteration == 125);
}

TEST_CASE("unknown keys are rejected with their path") {
  auto text = minimal_benchmark_config();
  text.insert(text.rfind('}'), R"(, "tpyo": 1)");
  CHECK_THROWS_WITH_AS(parse_run_config(text), doctest::Contains("tpyo"), Error);

  CHECK_THROWS_WITH_AS(
      parse_run_config(R"({"preset": "single_articulation",
                           "evaluator": {"type": "spine_tdr", "oops": 3},
                           "objective": {"kind": "eq2"}})"),
      doctest::Contains("oops"), Error);
}

TEST_CASE("parse errors carry a line number") {
  const std::string broken = "{\n \"preset\": \"custom\",\n BAD\n}";
  CHECK_THROWS_WITH_AS(parse_run_config(broken, "cfg.json"), doctest::Contains("cfg.json:3"),
                       Error);
}

TEST_CASE("round-trip: emitted config re-parses to the same settings") {
  auto cfg = parse_run_config(minimal_benchmark_config());
  cfg.settings.seed = 123;
  cfg.w1 = 2.0;
  const auto text = run_config_to_json(cfg);
  const auto back = parse_run_config(text);
  CHECK(back.preset == cfg.preset);
  CHECK(back.settings.seed == 123);
  CHECK(back.space.dim() == 2);
  CHECK(back.evaluator_type == "benchmark");
  CHECK(back.settings.samples_per_iteration == cfg.settings.samples_per_iteration);
}

TEST_CASE("objective construction") {
  auto cfg = parse_run_config(minimal_benchmark_config());

  SUBCASE("scalar") {
    const auto obj = build_objective(cfg);
    REQUIRE(obj.terms.size() == 1);
    CHECK(obj.terms[0].response == "objective");
  }

  SUBCASE("eq1 uses the configured weights on absolute displacements") {
    cfg.objective_kind = "eq1";
    cfg.w1 = 1.0;
    cfg.w2 = 4.0;
    const auto obj = build_objective(cfg);
    REQUIRE(obj.terms.size() == 2);
    CHECK(obj.terms[0].response == "d_subsidence");
    CHECK(obj.terms[1].weight == 4.0);
    CHECK(obj.terms[0].absolute);
    const double v = obj.evaluate({{"d_subsidence", -0.5}, {"d_expulsion", 0.1}});
    CHECK(v == doctest::Approx(0.5 + 0.4));
  }

  SUBCASE("eq2 defaults to the sixteen canonical errors with unit weights") {
    cfg.objective_kind = "eq2";
    const auto obj = build_objective(cfg);
    CHECK(obj.terms.size() == 16);
    CHECK(obj.terms[0].response == "mse_strain_capsular_flexion");
    for (const auto& t : obj.terms) CHECK(t.weight == 1.0);
  }

  SUBCASE("eq2 weight count must match the responses") {
    cfg.objective_kind = "eq2";
    cfg.eq2_weights = {1.0, 2.0};
    CHECK_THROWS_AS(build_objective(cfg), Error);
  }
}

TEST_CASE("preset configs reject inline spaces and bad modes") {
  CHECK_THROWS_WITH_AS(
      parse_run_config(R"({"preset": "single_articulation",
                           "space": {"variables": []},
                           "evaluator": {"type": "spine_tdr"},
                           "objective": {"kind": "eq2"}})"),
      doctest::Contains("space"), Error);

  CHECK_THROWS_WITH_AS(
      parse_run_config(R"({"preset": "single_articulation",
                           "evaluator": {"type": "spine_tdr"},
                           "objective": {"kind": "eq2"},
                           "mode": "split_then_combine"})"),
      doctest::Contains("mode"), Error);
}

TEST_CASE("space constants can be overridden from the config") {
  const auto cfg = parse_run_config(R"({
    "preset": "bone_inferior",
    "constants": {"footprint_margin": 2.0},
    "evaluator": {"type": "bone_surrogate", "side": "inferior"},
    "objective": {"kind": "eq1"}
  })");
  CHECK(cfg.space.constant("footprint_margin") == 2.0);
  CHECK(cfg.space.constant("endplate_inferior_x") == 15.0);  // default retained
}

TEST_CASE("spine constants parse nested sections with defaults") {
  const auto cfg = parse_run_config(R"({
    "preset": "single_articulation",
    "evaluator": {"type": "spine_tdr", "constants": {
      "bearing_stiffness": 900,
      "congruence": {"lateral_bending": 0.5},
      "segment": {"interspinal": {"stiffness": 25}}
    }},
    "objective": {"kind": "eq2"}
  })");
  CHECK(cfg.spine.bearing_stiffness == 900.0);
  CHECK(cfg.spine.congruence.lateral_bending == 0.5);
  CHECK(cfg.spine.congruence.axial_rotation == doctest::Approx(0.3));  // default retained
  CHECK(cfg.spine.segment.interspinal.stiffness == 25.0);
  CHECK(cfg.spine.segment.capsular.stiffness == 30.0);
}

TEST_CASE("baseline values resolve from presets, overrides and custom centers") {
  auto cfg = parse_run_config(minimal_benchmark_config());
  CHECK(baseline_values(cfg) == std::vector<double>{0.0, 0.0});  // region center

  cfg.baseline_override = {{"x0", 1.0}, {"x1", -2.0}};
  CHECK(baseline_values(cfg) == std::vector<double>{1.0, -2.0});

  cfg.baseline_override = {{"x0", 1.0}};
  CHECK_THROWS_AS(baseline_values(cfg), Error);

  const auto single = parse_run_config(template_config("single_articulation"));
  CHECK(baseline_values(single)[2] == doctest::Approx(4.60));  // sphere_radius
}

TEST_CASE("run dir resolution honors SRSM_OPT_DIR for relative paths") {
  auto cfg = parse_run_config(minimal_benchmark_config());
  ::setenv("SRSM_OPT_DIR", "/tmp/srsm_root", 1);
  CHECK(resolve_run_dir(cfg) == fs::path("/tmp/srsm_root/run_x"));
  ::unsetenv("SRSM_OPT_DIR");
  CHECK(resolve_run_dir(cfg) == fs::path("run_x"));
  cfg.output_dir = "/abs/path";
  ::setenv("SRSM_OPT_DIR", "/tmp/srsm_root", 1);
  CHECK(resolve_run_dir(cfg) == fs::path("/abs/path"));
  ::unsetenv("SRSM_OPT_DIR");
}

TEST_CASE("targets come from the csv when configured") {
  const auto spine_cfg = parse_run_config(template_config("single_articulation"));
  const auto generated = build_targets(spine_cfg);
  CHECK(generated.size() == 16);

  const auto dir = fs::temp_directory_path() / "srsm_cfg_targets";
  fs::create_directories(dir);
  const auto path = (dir / "targets.csv").string();
  write_curves_csv(path, generated);

  auto with_csv = spine_cfg;
  with_csv.targets_csv = path;
  const auto loaded = build_targets(with_csv);
  REQUIRE(loaded.size() == 16);
  for (const auto& [name, curve] : generated)
    CHECK(loaded.at(name).values == curve.values);
}
