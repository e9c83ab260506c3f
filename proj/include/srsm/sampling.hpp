#pragma once

#include "srsm/rng.hpp"
#include "srsm/space.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace srsm {

struct SamplerConfig {
  int samples_per_iteration = 0;  // set per problem profile
  int pool_factor = 100;
  long max_rejects = 1000000;
};

struct SamplePlan {
  std::vector<DesignPoint> points;
  std::vector<long> prior_points_used;
  std::uint64_t seed = 0;
};

/// Greedy maximin subset selection: from `pool` (normalized coordinates),
/// repeatedly pick the candidate whose minimum distance to the occupied set
/// (prior ∪ already selected) is largest. With an empty occupied set the
/// first pool entry seeds the selection. Returns indices into `pool`.
/// Candidates at zero distance to an occupied site are never selected.
std::vector<std::size_t> select_maximin(const std::vector<std::vector<double>>& pool,
                                        const std::vector<std::vector<double>>& occupied,
                                        std::size_t n);

/// Space-filling sample of `n` feasible points in `region`. Prior points that
/// fall inside the region act as fixed occupied sites (and are reported in
/// prior_points_used). Deterministic for a given seed.
/// Throws Error when rejection sampling cannot produce a feasible pool; the
/// message names the most frequently violated constraint.
SamplePlan maximin_fill(const Region& region, const DesignSpace& space, int n,
                        const std::vector<DesignPoint>& prior,
                        const std::function<FeasibilityReport(const DesignPoint&)>& constraints,
                        std::uint64_t seed, const SamplerConfig& cfg = SamplerConfig{});

/// Rejection-draws up to `count` feasible normalized points (helper shared
/// with the GA population initializer). Returns fewer when the budget of
/// `max_rejects` failed draws is exhausted.
std::vector<std::vector<double>> draw_feasible_pool(
    const Region& region, const DesignSpace& space, std::size_t count,
    const std::function<FeasibilityReport(const DesignPoint&)>& constraints, Rng& rng,
    long max_rejects, std::map<std::string, long>* violation_counts = nullptr);

} // namespace srsm
