#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace srsm {

struct SobolResult {
  std::map<std::string, double> first_order;
  std::map<std::string, double> total;
  int n_samples = 0;  // base sample count (total evaluations: n*(d+2))
  std::string objective;
  double output_variance = 0.0;
  std::vector<std::string> flags;  // "constant_function", "negative_first_order:<var>", ...
};

/// Saltelli pick-freeze estimator over the unit cube: two independent base
/// matrices plus d cross matrices; first-order indices use the Saltelli 2010
/// estimator, totals use Jansen's. Discrete dims sample their normalized
/// levels. Deterministic per seed.
SobolResult sobol(const std::function<double(const std::vector<double>&)>& fn,
                  const std::vector<std::string>& variable_names,
                  const std::vector<std::vector<double>>& discrete_levels, int n_base,
                  std::uint64_t seed, const std::string& objective_name = "");

struct RankedVariable {
  std::string name;
  double score = 0.0;
};

/// Combines per-objective total indices into one ranking: each variable's
/// score is the objective-weighted, variance-weighted mean of its total
/// indices. Descending by score, ties broken by name.
std::vector<RankedVariable> aggregate_ranking(const std::vector<SobolResult>& results,
                                              const std::vector<double>& objective_weights,
                                              const std::vector<double>& objective_variances);

} // namespace srsm
