#pragma once

#include "srsm/problem.hpp"
#include "srsm/space.hpp"
#include "srsm/surrogate.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace srsm {

struct OptimizerConfig {
  int population = 100;
  int generations = 250;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // <= 0 means 1/d per gene
  double blend_alpha = 0.5;
  double penalty_factor = 1e3;
  int refine_steps = 200;
  double refine_tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using ViolationsFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Minimization problem over the unit cube. Discrete genes carry their
/// admissible normalized level values; continuous genes have an empty list.
struct NormalizedProblem {
  int dim = 0;
  ObjectiveFn objective;
  ViolationsFn violations;  // optional; empty = unconstrained
  std::vector<std::vector<double>> discrete_levels;
  std::function<bool(const std::vector<double>&)> init_feasible;  // optional seeding filter
};

/// f + penalty_factor * sum(violations^2).
double penalized_value(double f, const std::vector<double>& violations, double penalty_factor);

struct GaResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  std::vector<double> best_violations;
  double best_penalized = 0.0;
  std::vector<double> best_history;  // best penalized value per generation
  double final_penalty_factor = 0.0;
};

/// Real-coded GA: tournament selection of size 2, blend crossover, per-gene
/// Gaussian mutation (sigma 0.1 of the normalized range), elitism of one.
/// The penalty factor doubles at generations 50/100/150/200 while the best
/// individual remains infeasible. Deterministic for a given config seed.
GaResult ga_minimize(const NormalizedProblem& problem, const OptimizerConfig& cfg);

struct RefineResult {
  std::vector<double> x;
  double penalized = 0.0;
  int steps_taken = 0;
  double gradient_norm = 0.0;
};

/// Projected gradient descent on `fn` over [0,1]^d with central finite
/// differences (h = 1e-4) and Armijo backtracking. Dims listed in `frozen`
/// never move (discrete genes during refinement).
RefineResult gradient_refine(const ObjectiveFn& fn, const std::vector<double>& start,
                             const std::vector<bool>& frozen, int max_steps, double tol);

struct OptimumReport {
  DesignPoint point;
  std::vector<double> normalized;  // final position in region coordinates
  double predicted_objective = 0.0;
  std::vector<double> scaled_violations;
  bool feasible = true;
  bool extrapolated = false;
  double ga_best = 0.0;      // penalized value after the GA stage
  double refined_gain = 0.0; // ga_best - final penalized value (>= 0)
  std::vector<double> ga_history;
};

/// GA followed by gradient refinement. The refined point never has a worse
/// penalized value than the GA best (the better of the two is kept).
OptimumReport hybrid_optimize(const NormalizedProblem& problem, const DesignSpace& space,
                              const Region& region, const OptimizerConfig& cfg);

/// Assembles the metamodel-backed problem: the objective evaluates `spec`
/// on model predictions; violations combine the response constraints (on
/// model predictions) with the preset sampling constraints evaluated on the
/// denormalized geometry.
NormalizedProblem make_metamodel_problem(const std::map<std::string, RBFModel>& models,
                                         const ObjectiveSpec& objective,
                                         const std::vector<ConstraintSpec>& constraints,
                                         const DesignSpace& space, const Region& region);

/// Direct-function problem over a space/region (benchmarks and tests).
NormalizedProblem make_direct_problem(const ObjectiveFn& objective, const ViolationsFn& violations,
                                      const DesignSpace& space, const Region& region);

} // namespace srsm
