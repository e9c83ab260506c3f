#include "srsm/sampling.hpp"

#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srsm {

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

} // namespace

std::vector<std::size_t> select_maximin(const std::vector<std::vector<double>>& pool,
                                        const std::vector<std::vector<double>>& occupied,
                                        std::size_t n) {
  std::vector<std::size_t> selected;
  if (n == 0 || pool.empty()) return selected;

  // min squared distance from each pool candidate to the occupied set so far
  std::vector<double> min_d2(pool.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (const auto& o : occupied) min_d2[i] = std::min(min_d2[i], dist2(pool[i], o));

  std::vector<bool> taken(pool.size(), false);
  while (selected.size() < n) {
    std::size_t best = pool.size();
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      if (!occupied.empty() || !selected.empty()) {
        if (min_d2[i] == 0.0) continue;  // duplicate of an occupied site
        if (min_d2[i] > best_d2) {
          best_d2 = min_d2[i];
          best = i;
        }
      } else {
        // Empty occupied set: the first pool entry seeds the selection.
        best = i;
        best_d2 = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (best == pool.size())
      throw Error("maximin selection exhausted: pool has only duplicates or is too small");
    taken[best] = true;
    selected.push_back(best);
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!taken[i]) min_d2[i] = std::min(min_d2[i], dist2(pool[i], pool[best]));
  }
  return selected;
}

std::vector<std::vector<double>> draw_feasible_pool(
    const Region& region, const DesignSpace& space, std::size_t count,
    const std::function<FeasibilityReport(const DesignPoint&)>& constraints, Rng& rng,
    long max_rejects, std::map<std::string, long>* violation_counts) {
  std::vector<std::vector<double>> pool;
  pool.reserve(count);
  long rejects = 0;
  const int d = region.dim();
  while (pool.size() < count) {
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = rng.uniform();
    const auto values = denormalize(u, region, space);
    bool feasible = true;
    if (constraints) {
      const auto point = resolve_dependents(values, space);
      const auto report = constraints(point);
      feasible = report.feasible;
      if (!feasible && violation_counts)
        for (const auto& v : report.violations) ++(*violation_counts)[v.name];
    }
    if (feasible) {
      // Store the normalized coordinates of the snapped values so discrete
      // variables land exactly on levels.
      pool.push_back(normalize(values, region));
    } else if (++rejects > max_rejects) {
      break;
    }
  }
  return pool;
}

SamplePlan maximin_fill(const Region& region, const DesignSpace& space, int n,
                        const std::vector<DesignPoint>& prior,
                        const std::function<FeasibilityReport(const DesignPoint&)>& constraints,
                        std::uint64_t seed, const SamplerConfig& cfg) {
  if (n < 1) throw Error("maximin_fill: n must be >= 1");
  if (region.dim() != space.dim()) throw Error("maximin_fill: region/space dimension mismatch");

  Rng rng(seed);
  std::map<std::string, long> violation_counts;
  const std::size_t pool_target = static_cast<std::size_t>(cfg.pool_factor) * n;
  auto pool =
      draw_feasible_pool(region, space, pool_target, constraints, rng, cfg.max_rejects,
                         &violation_counts);
  if (pool.size() < static_cast<std::size_t>(n)) {
    std::string dominant = "(none)";
    long worst = -1;
    for (const auto& [name, c] : violation_counts)
      if (c > worst) {
        worst = c;
        dominant = name;
      }
    throw Error("sampling space looks infeasible: only " + std::to_string(pool.size()) + " of " +
                std::to_string(n) + " feasible points found; dominant violated constraint: " +
                dominant);
  }

  SamplePlan plan;
  plan.seed = seed;
  std::vector<std::vector<double>> occupied;
  for (const auto& p : prior) {
    if (!region.contains(p.values)) continue;
    occupied.push_back(normalize(p.values, region));
    plan.prior_points_used.push_back(p.id);
  }

  const auto chosen = select_maximin(pool, occupied, static_cast<std::size_t>(n));
  for (std::size_t idx : chosen) {
    const auto values = denormalize(pool[idx], region, space);
    plan.points.push_back(resolve_dependents(values, space));
  }
  return plan;
}

} // namespace srsm
