#include "srsm/sensitivity.hpp"

#include "srsm/rng.hpp"
#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>

namespace srsm {

SobolResult sobol(const std::function<double(const std::vector<double>&)>& fn,
                  const std::vector<std::string>& variable_names,
                  const std::vector<std::vector<double>>& discrete_levels, int n_base,
                  std::uint64_t seed, const std::string& objective_name) {
  const int d = static_cast<int>(variable_names.size());
  if (d < 1) throw Error("sobol: no variables");
  if (n_base < 64) throw Error("sobol: n_base must be >= 64");
  if (!discrete_levels.empty() && static_cast<int>(discrete_levels.size()) != d)
    throw Error("sobol: discrete level table size mismatch");

  // Each variable's sample column comes from a substream keyed by its NAME,
  // so permuting the variable order permutes the indices identically.
  const int n = n_base;
  std::vector<std::vector<double>> a(n, std::vector<double>(d));
  std::vector<std::vector<double>> b(n, std::vector<double>(d));
  for (int i = 0; i < d; ++i) {
    Rng column(substream_seed(seed, "sobol_dim_" + variable_names[i]));
    auto draw = [&]() {
      if (!discrete_levels.empty() && !discrete_levels[i].empty()) {
        const auto& levels = discrete_levels[i];
        return levels[column.index(levels.size())];
      }
      return column.uniform();
    };
    for (int j = 0; j < n; ++j) a[j][i] = draw();
    for (int j = 0; j < n; ++j) b[j][i] = draw();
  }

  std::vector<double> fa(n), fb(n);
  for (int j = 0; j < n; ++j) fa[j] = fn(a[j]);
  for (int j = 0; j < n; ++j) fb[j] = fn(b[j]);

  double mean = 0.0;
  for (int j = 0; j < n; ++j) mean += fa[j] + fb[j];
  mean /= 2.0 * n;
  // Centering the outputs before the pick-freeze products reduces the
  // estimator variance substantially.
  for (int j = 0; j < n; ++j) {
    fa[j] -= mean;
    fb[j] -= mean;
  }
  double variance = 0.0;
  for (int j = 0; j < n; ++j) {
    variance += fa[j] * fa[j];
    variance += fb[j] * fb[j];
  }
  variance /= 2.0 * n - 1.0;

  SobolResult result;
  result.n_samples = n;
  result.objective = objective_name;
  result.output_variance = variance;

  if (variance <= 1e-300) {
    result.flags.push_back("constant_function");
    for (const auto& name : variable_names) {
      result.first_order[name] = 0.0;
      result.total[name] = 0.0;
    }
    return result;
  }

  std::vector<double> f_abi(n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> x = a[j];
      x[i] = b[j][i];
      f_abi[j] = fn(x) - mean;
    }
    double s_i = 0.0;
    double st_i = 0.0;
    for (int j = 0; j < n; ++j) {
      s_i += fb[j] * (f_abi[j] - fa[j]);
      const double diff = fa[j] - f_abi[j];
      st_i += diff * diff;
    }
    s_i /= n * variance;
    st_i /= 2.0 * n * variance;
    result.first_order[variable_names[i]] = s_i;
    result.total[variable_names[i]] = st_i;
    if (s_i < 0.0) result.flags.push_back("negative_first_order:" + variable_names[i]);
  }
  return result;
}

std::vector<RankedVariable> aggregate_ranking(const std::vector<SobolResult>& results,
                                              const std::vector<double>& objective_weights,
                                              const std::vector<double>& objective_variances) {
  if (results.empty()) throw Error("aggregate_ranking: no results");
  if (results.size() != objective_weights.size() || results.size() != objective_variances.size())
    throw Error("aggregate_ranking: weight/variance count mismatch");

  std::map<std::string, double> score;
  double total_mass = 0.0;
  for (std::size_t j = 0; j < results.size(); ++j) {
    const double mass = objective_weights[j] * objective_variances[j];
    total_mass += mass;
    for (const auto& [name, st] : results[j].total) score[name] += mass * st;
  }
  std::vector<RankedVariable> ranking;
  for (const auto& [name, s] : score)
    ranking.push_back({name, total_mass > 0.0 ? s / total_mass : 0.0});
  std::sort(ranking.begin(), ranking.end(), [](const RankedVariable& x, const RankedVariable& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.name < y.name;
  });
  return ranking;
}

} // namespace srsm
