#pragma once

#include "srsm/evaluators.hpp"
#include "srsm/optimizer.hpp"
#include "srsm/problem.hpp"
#include "srsm/sampling.hpp"
#include "srsm/space.hpp"
#include "srsm/surrogate.hpp"

#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace srsm {

struct TerminationConfig {
  double tol_p = 0.01;
  double tol_f = 0.01;
  int max_iterations = 50;

  void validate() const;
};

struct DomainReductionConfig {
  double gamma_shrink = 0.75;
  double gamma_osc = 0.6;
  double gamma_pan = 1.0;
  double pan_threshold = 0.95;      // |d| at/above which the region pans without shrinking
  double resolution_floor = 0.005;  // minimal half-range as a fraction of the initial range
};

struct TerminationDecision {
  bool stop = false;
  std::string reason;  // "design_change" | "objective" | "max_iterations"
  double design_change = std::numeric_limits<double>::quiet_NaN();
  double objective_change = std::numeric_limits<double>::quiet_NaN();
};

/// A design with its true evaluation, objective value and scaled constraint
/// violations (response constraints plus the sampling-constraint magnitude).
struct EvaluatedDesign {
  DesignPoint point;
  ResponseSet responses;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> violations;
  bool feasible = false;
};

struct ModelSummary {
  std::string response;
  int n_centers = 0;
  double shape_c = 0.0;
  double max_training_residual = 0.0;
  double loo_rms = 0.0;
  bool ridge_used = false;
};

struct IterationRecord {
  int k = 0;
  Region region;
  std::vector<EvaluatedDesign> samples;  // the iteration's response table
  std::vector<long> sample_ids;
  std::vector<long> prior_ids;
  std::vector<long> fit_ids;
  std::vector<ModelSummary> model_stats;
  std::map<std::string, RBFModel> models;
  OptimumReport predicted;
  EvaluatedDesign verified;
  bool verified_from_sample = false;  // verification evaluation failed; best sample used
  double f_k = std::numeric_limits<double>::quiet_NaN();
  TerminationDecision termination;
  std::vector<double> d_vector;  // normalized optimum offsets driving domain reduction
};

struct RunResult {
  EvaluatedDesign baseline;
  std::vector<IterationRecord> history;
  EvaluatedDesign best;
  std::string termination_reason;
  double improvement_percent = 0.0;
  bool finished = false;
};

/// Stopping decision after iteration k = history.size(): design-change and
/// objective tolerances need k >= 2; the iteration cap applies always. The
/// reason names the first criterion met in that order.
TerminationDecision check_termination(const std::vector<IterationRecord>& history,
                                      const TerminationConfig& cfg, const Region& initial_region);

/// Pans/shrinks the region around the iteration optimum. Per variable the
/// normalized offset d = (opt - center)/half_range selects the contraction:
/// oscillation against d_prev contracts by gamma_osc, |d| at the boundary
/// pans without shrinking, otherwise gamma_shrink applies. The new box is
/// clipped into the initial bounds and floored at the resolution floor.
/// Discrete variables keep their full initial range. Returns the new region
/// and the d vector to feed the next reduction.
std::pair<Region, std::vector<double>> reduce_domain(const Region& region,
                                                     const std::vector<double>& optimum_values,
                                                     const std::vector<double>& d_prev,
                                                     const DomainReductionConfig& cfg,
                                                     const DesignSpace& space,
                                                     const Region& initial_region);

struct RunSettings {
  int samples_per_iteration = 0;
  SamplerConfig sampler;
  OptimizerConfig optimizer;
  TerminationConfig termination;
  DomainReductionConfig reduction;
  double reuse_window = 1.2;
  int parallelism = 1;
  std::uint64_t seed = 0;
};

/// The sequential response-surface loop: sample, evaluate, fit one RBF per
/// response, optimize on the metamodels, verify the predicted optimum with a
/// true evaluation, check termination and reduce the region. State persists
/// under run_dir after every iteration, making runs resumable; identical
/// config and seed reproduce identical artifacts byte for byte.
class Runner {
public:
  Runner(DesignSpace space, std::shared_ptr<const Evaluator> evaluator, ObjectiveSpec objective,
         std::vector<ConstraintSpec> constraints, RunSettings settings,
         std::filesystem::path run_dir, std::vector<double> baseline_values,
         std::map<std::string, Curve> targets = {});

  /// Loads persisted state from run_dir; true when a prior run was found.
  bool load_state();

  /// Runs until termination. A non-negative session limit stops after that
  /// many additional iterations with state saved (kill/resume semantics).
  RunResult run(int session_iteration_limit = -1);

  IterationRecord run_iteration();

  const RunResult& result() const { return result_; }
  const Region& current_region() const { return region_; }
  const Region& initial_region() const { return initial_region_; }
  const std::vector<EvaluatedDesign>& evaluated_points() const { return all_points_; }
  const DesignSpace& design_space() const { return space_; }

  EvaluatedDesign evaluate_design(const std::vector<double>& values, int iteration);

private:
  void persist();
  void update_best();
  std::vector<std::string> response_names_to_fit() const;
  EvaluatedDesign make_evaluated(DesignPoint point) const;

  DesignSpace space_;
  std::shared_ptr<const Evaluator> evaluator_;
  ObjectiveSpec objective_;
  std::vector<ConstraintSpec> constraints_;
  RunSettings settings_;
  std::filesystem::path run_dir_;
  std::map<std::string, Curve> targets_;

  Region initial_region_;
  Region region_;
  std::vector<double> d_prev_;
  std::vector<EvaluatedDesign> all_points_;
  RunResult result_;
  long next_id_ = 0;
};

} // namespace srsm
