#pragma once

#include "srsm/evaluators.hpp"
#include "srsm/problem.hpp"
#include "srsm/srsm.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace srsm {

/// Fully parsed and validated run configuration. Parsing rejects unknown
/// keys so typos fail loudly instead of silently using defaults.
struct RunConfig {
  std::string description;
  std::string preset = "custom";
  DesignSpace space;
  std::map<std::string, double> baseline_override;

  std::string evaluator_type;  // bone_surrogate | spine_tdr | benchmark | external
  std::string bone_side = "inferior";
  BoneConstants bone;
  SpineConstants spine = SpineConstants::defaults();
  std::string targets_csv;
  std::string benchmark_function = "sphere";
  std::string external_command;
  std::string external_workdir;
  double external_timeout_s = 14400.0;

  std::string objective_kind;  // eq1 | eq2 | scalar
  double w1 = 1.0, w2 = 1.0;
  std::vector<std::string> eq2_responses;  // mse_* scalar names; default: the 16 canonical
  std::vector<double> eq2_weights;
  std::string scalar_response = "objective";

  std::vector<ConstraintSpec> constraints;
  RunSettings settings;
  std::string output_dir = "run";
  std::string mode = "single";  // single | split_then_combine
};

RunConfig parse_run_config(const std::string& json_text, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& cfg);

ObjectiveSpec build_objective(const RunConfig& cfg);
std::shared_ptr<Evaluator> build_evaluator(const RunConfig& cfg);

/// Target curves for curve-matching runs: loaded from cfg.targets_csv when
/// set, otherwise generated from the intact segment parameters.
std::map<std::string, Curve> build_targets(const RunConfig& cfg);

std::vector<double> baseline_values(const RunConfig& cfg);

/// Resolves the run directory: absolute output_dir is used as-is; relative
/// paths root at $SRSM_OPT_DIR when set, else the current directory.
std::filesystem::path resolve_run_dir(const RunConfig& cfg);

std::unique_ptr<Runner> build_runner(const RunConfig& cfg, const std::filesystem::path& run_dir);

/// Annotated template for one of the four reference problems.
std::string template_config(const std::string& problem);

} // namespace srsm
