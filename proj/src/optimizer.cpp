#include "srsm/optimizer.hpp"

#include "srsm/rng.hpp"
#include "srsm/sampling.hpp"
#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srsm {

void OptimizerConfig::validate() const {
  if (population < 4) throw Error("optimizer: population must be >= 4");
  if (generations < 1) throw Error("optimizer: generations must be >= 1");
}

double penalized_value(double f, const std::vector<double>& violations, double penalty_factor) {
  double p = f;
  for (double v : violations) p += penalty_factor * v * v;
  return p;
}

namespace {

constexpr double kFeasibleTol = 1e-9;
constexpr double kMutationSigma = 0.1;
constexpr int kInitPoolFactor = 10;

double snap_to_levels(double v, const std::vector<double>& levels) {
  double best = levels.front();
  double best_dist = std::abs(v - best);
  for (double level : levels) {
    const double d = std::abs(v - level);
    if (d < best_dist) {
      best = level;
      best_dist = d;
    }
  }
  return best;
}

void snap_discrete(std::vector<double>& x, const NormalizedProblem& p) {
  for (int i = 0; i < p.dim; ++i)
    if (!p.discrete_levels[i].empty()) x[i] = snap_to_levels(x[i], p.discrete_levels[i]);
}

struct Individual {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> violations;
  double violation_sq_sum = 0.0;
  bool feasible = true;

  double penalized(double factor) const { return f + factor * violation_sq_sum; }
};

Individual evaluate_individual(std::vector<double> x, const NormalizedProblem& p) {
  snap_discrete(x, p);
  Individual ind;
  ind.x = std::move(x);
  ind.f = p.objective(ind.x);
  if (p.violations) {
    ind.violations = p.violations(ind.x);
    for (double v : ind.violations) {
      ind.violation_sq_sum += v * v;
      if (v > kFeasibleTol) ind.feasible = false;
    }
  }
  return ind;
}

std::vector<std::vector<double>> initial_population(const NormalizedProblem& p, int n, Rng& rng) {
  // Space-filling seeding over the unit cube; infeasible draws fall back to
  // plain uniforms so the GA can still start when the feasible set is thin
  // (the penalty drives it back).
  std::vector<std::vector<double>> pool;
  const std::size_t target = static_cast<std::size_t>(kInitPoolFactor) * n;
  long budget = static_cast<long>(50) * static_cast<long>(target);
  while (pool.size() < target && budget-- > 0) {
    std::vector<double> u(p.dim);
    for (int i = 0; i < p.dim; ++i) u[i] = rng.uniform();
    snap_discrete(u, p);
    if (!p.init_feasible || p.init_feasible(u)) pool.push_back(std::move(u));
  }
  while (pool.size() < static_cast<std::size_t>(n)) {
    std::vector<double> u(p.dim);
    for (int i = 0; i < p.dim; ++i) u[i] = rng.uniform();
    snap_discrete(u, p);
    pool.push_back(std::move(u));
  }
  const auto chosen = select_maximin(pool, {}, static_cast<std::size_t>(n));
  std::vector<std::vector<double>> population;
  population.reserve(n);
  for (std::size_t idx : chosen) population.push_back(pool[idx]);
  return population;
}

std::size_t tournament(const std::vector<Individual>& pop, double factor, Rng& rng) {
  const std::size_t a = rng.index(pop.size());
  const std::size_t b = rng.index(pop.size());
  return pop[a].penalized(factor) <= pop[b].penalized(factor) ? a : b;
}

} // namespace

GaResult ga_minimize(const NormalizedProblem& problem, const OptimizerConfig& cfg) {
  cfg.validate();
  if (problem.dim <= 0) throw Error("ga_minimize: empty problem");
  if (static_cast<int>(problem.discrete_levels.size()) != problem.dim)
    throw Error("ga_minimize: discrete level table size mismatch");

  Rng rng(cfg.seed);
  const double mutation_rate =
      cfg.mutation_rate > 0.0 ? cfg.mutation_rate : 1.0 / static_cast<double>(problem.dim);

  std::vector<Individual> pop;
  pop.reserve(cfg.population);
  for (auto& x : initial_population(problem, cfg.population, rng))
    pop.push_back(evaluate_individual(std::move(x), problem));

  double factor = cfg.penalty_factor;
  auto best_index = [&]() {
    std::size_t bi = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
      if (pop[i].penalized(factor) < pop[bi].penalized(factor)) bi = i;
    return bi;
  };

  GaResult result;
  result.best_history.reserve(cfg.generations + 1);
  Individual best = pop[best_index()];
  result.best_history.push_back(best.penalized(factor));

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    if ((gen == 50 || gen == 100 || gen == 150 || gen == 200) && !best.feasible) factor *= 2.0;

    std::vector<Individual> next;
    next.reserve(pop.size());
    next.push_back(best);  // elitism of one
    while (next.size() < pop.size()) {
      const auto& pa = pop[tournament(pop, factor, rng)];
      const auto& pb = pop[tournament(pop, factor, rng)];
      std::vector<double> c1 = pa.x;
      std::vector<double> c2 = pb.x;
      if (rng.uniform() < cfg.crossover_rate) {
        for (int g = 0; g < problem.dim; ++g) {
          if (!problem.discrete_levels[g].empty()) {
            // Categorical gene: each child inherits one parent's level.
            c1[g] = rng.coin() ? pa.x[g] : pb.x[g];
            c2[g] = rng.coin() ? pa.x[g] : pb.x[g];
          } else {
            const double lo = std::min(pa.x[g], pb.x[g]);
            const double hi = std::max(pa.x[g], pb.x[g]);
            const double span = hi - lo;
            const double a = lo - cfg.blend_alpha * span;
            const double b = hi + cfg.blend_alpha * span;
            c1[g] = std::clamp(rng.uniform(a, b), 0.0, 1.0);
            c2[g] = std::clamp(rng.uniform(a, b), 0.0, 1.0);
          }
        }
      }
      for (auto* child : {&c1, &c2}) {
        for (int g = 0; g < problem.dim; ++g) {
          if (rng.uniform() >= mutation_rate) continue;
          if (!problem.discrete_levels[g].empty()) {
            const auto& levels = problem.discrete_levels[g];
            (*child)[g] = levels[rng.index(levels.size())];
          } else {
            (*child)[g] = std::clamp((*child)[g] + rng.normal(0.0, kMutationSigma), 0.0, 1.0);
          }
        }
        if (next.size() < pop.size()) next.push_back(evaluate_individual(*child, problem));
      }
    }
    pop = std::move(next);
    const auto bi = best_index();
    if (pop[bi].penalized(factor) < best.penalized(factor)) best = pop[bi];
    result.best_history.push_back(best.penalized(factor));
  }

  result.best_x = best.x;
  result.best_f = best.f;
  result.best_violations = best.violations;
  result.best_penalized = best.penalized(factor);
  result.final_penalty_factor = factor;
  return result;
}

RefineResult gradient_refine(const ObjectiveFn& fn, const std::vector<double>& start,
                             const std::vector<bool>& frozen, int max_steps, double tol) {
  constexpr double kFdStep = 1e-4;
  constexpr double kArmijoC = 1e-4;
  const int d = static_cast<int>(start.size());

  auto project = [&](std::vector<double> x) {
    for (int i = 0; i < d; ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    return x;
  };

  RefineResult res;
  res.x = project(start);
  double fx = fn(res.x);
  for (int step = 0; step < max_steps; ++step) {
    std::vector<double> grad(d, 0.0);
    double gnorm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      if (!frozen.empty() && frozen[i]) continue;
      auto xp = res.x;
      auto xm = res.x;
      xp[i] = std::clamp(xp[i] + kFdStep, 0.0, 1.0);
      xm[i] = std::clamp(xm[i] - kFdStep, 0.0, 1.0);
      const double h = xp[i] - xm[i];
      if (h <= 0.0) continue;
      grad[i] = (fn(xp) - fn(xm)) / h;
      gnorm2 += grad[i] * grad[i];
    }
    res.gradient_norm = std::sqrt(gnorm2);
    if (res.gradient_norm < tol) break;

    double t = 1.0 / std::max(1.0, res.gradient_norm);
    bool moved = false;
    while (t > 1e-14) {
      std::vector<double> trial = res.x;
      for (int i = 0; i < d; ++i) trial[i] -= t * grad[i];
      trial = project(trial);
      const double ft = fn(trial);
      double step_dot = 0.0;
      for (int i = 0; i < d; ++i) step_dot += grad[i] * (res.x[i] - trial[i]);
      if (ft <= fx - kArmijoC * step_dot && ft < fx) {
        res.x = std::move(trial);
        fx = ft;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    ++res.steps_taken;
    if (!moved) break;  // no descent direction within the box
  }
  res.penalized = fx;
  return res;
}

namespace {

std::vector<bool> frozen_dims(const NormalizedProblem& p) {
  std::vector<bool> frozen(p.dim, false);
  for (int i = 0; i < p.dim; ++i) frozen[i] = !p.discrete_levels[i].empty();
  return frozen;
}

} // namespace

OptimumReport hybrid_optimize(const NormalizedProblem& problem, const DesignSpace& space,
                              const Region& region, const OptimizerConfig& cfg) {
  const GaResult ga = ga_minimize(problem, cfg);

  const double factor = ga.final_penalty_factor;
  auto penalized_fn = [&](const std::vector<double>& x) {
    std::vector<double> snapped = x;
    snap_discrete(snapped, problem);
    const double f = problem.objective(snapped);
    if (!problem.violations) return f;
    return penalized_value(f, problem.violations(snapped), factor);
  };

  const RefineResult refined =
      gradient_refine(penalized_fn, ga.best_x, frozen_dims(problem), cfg.refine_steps,
                      cfg.refine_tol);

  // Keep whichever stage did better; refinement must never worsen the report.
  std::vector<double> final_x = refined.penalized <= ga.best_penalized ? refined.x : ga.best_x;
  snap_discrete(final_x, problem);

  OptimumReport report;
  report.normalized = final_x;
  report.ga_best = ga.best_penalized;
  report.ga_history = ga.best_history;
  report.predicted_objective = problem.objective(final_x);
  report.scaled_violations = problem.violations ? problem.violations(final_x) : std::vector<double>{};
  report.feasible = feasible_from_violations(report.scaled_violations);
  const double final_pen =
      penalized_value(report.predicted_objective, report.scaled_violations, factor);
  report.refined_gain = std::max(0.0, ga.best_penalized - final_pen);
  report.extrapolated = !inside_unit_box(final_x);
  report.point = resolve_dependents(denormalize(final_x, region, space), space);
  return report;
}

NormalizedProblem make_metamodel_problem(const std::map<std::string, RBFModel>& models,
                                         const ObjectiveSpec& objective,
                                         const std::vector<ConstraintSpec>& constraints,
                                         const DesignSpace& space, const Region& region) {
  for (const auto& term : objective.terms)
    if (!models.count(term.response))
      throw Error("no metamodel for objective response: " + term.response);
  for (const auto& c : constraints)
    if (!models.count(c.response))
      throw Error("no metamodel for constraint response: " + c.response);

  NormalizedProblem p;
  p.dim = space.dim();
  for (int i = 0; i < p.dim; ++i) {
    const auto& var = space.sampled(i);
    std::vector<double> levels;
    if (var.kind == VarKind::Discrete)
      for (double level : var.levels)
        levels.push_back((level - region.lo(i)) / (2.0 * region.half_range[i]));
    p.discrete_levels.push_back(std::move(levels));
  }

  p.objective = [&models, objective](const std::vector<double>& x) {
    double total = 0.0;
    for (const auto& term : objective.terms) {
      const double v = predict(models.at(term.response), x);
      total += term.weight * (term.absolute ? std::abs(v) : v);
    }
    return total;
  };
  p.violations = [&models, constraints, &space, region](const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(constraints.size() + 1);
    for (const auto& c : constraints) out.push_back(c.violation(predict(models.at(c.response), x)));
    const auto point = resolve_dependents(denormalize(x, region, space), space);
    out.push_back(check_sampling_constraints(point, space).total_scaled_violation());
    return out;
  };
  p.init_feasible = [&space, region](const std::vector<double>& u) {
    const auto point = resolve_dependents(denormalize(u, region, space), space);
    return check_sampling_constraints(point, space).feasible;
  };
  return p;
}

NormalizedProblem make_direct_problem(const ObjectiveFn& objective, const ViolationsFn& violations,
                                      const DesignSpace& space, const Region& region) {
  NormalizedProblem p;
  p.dim = space.dim();
  for (int i = 0; i < p.dim; ++i) {
    const auto& var = space.sampled(i);
    std::vector<double> levels;
    if (var.kind == VarKind::Discrete)
      for (double level : var.levels)
        levels.push_back((level - region.lo(i)) / (2.0 * region.half_range[i]));
    p.discrete_levels.push_back(std::move(levels));
  }
  p.objective = objective;
  p.violations = violations;
  return p;
}

} // namespace srsm
