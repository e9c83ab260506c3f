#include "srsm/srsm.hpp"

#include "srsm/persist.hpp"
#include "srsm/rng.hpp"
#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace srsm {

void TerminationConfig::validate() const {
  if (tol_p < 0.0 || tol_f < 0.0) throw Error("termination tolerances must be >= 0");
  if (max_iterations < 1) throw Error("max_iterations must be >= 1");
}

TerminationDecision check_termination(const std::vector<IterationRecord>& history,
                                      const TerminationConfig& cfg, const Region& initial_region) {
  if (history.empty()) throw Error("check_termination: empty history");
  TerminationDecision d;
  const int k = static_cast<int>(history.size());
  const auto& cur = history.back();

  if (k >= 2) {
    const auto& prev = history[history.size() - 2];
    double dp2 = 0.0;
    for (std::size_t i = 0; i < cur.verified.point.values.size(); ++i) {
      const double dv = cur.verified.point.values[i] - prev.verified.point.values[i];
      dp2 += dv * dv;
    }
    double omega2 = 0.0;
    for (double h : initial_region.half_range) omega2 += (2.0 * h) * (2.0 * h);
    d.design_change = std::sqrt(dp2) / std::sqrt(omega2);

    const double f_prev = prev.f_k;
    const double f_cur = cur.f_k;
    if (f_prev == 0.0)
      d.objective_change = std::abs(f_cur - f_prev);  // documented deviation for f=0
    else
      d.objective_change = std::abs((f_cur - f_prev) / f_prev);

    if (cfg.tol_p > d.design_change) {
      d.stop = true;
      d.reason = "design_change";
      return d;
    }
    if (cfg.tol_f > d.objective_change) {
      d.stop = true;
      d.reason = "objective";
      return d;
    }
  }
  if (k >= cfg.max_iterations) {
    d.stop = true;
    d.reason = "max_iterations";
  }
  return d;
}

std::pair<Region, std::vector<double>> reduce_domain(const Region& region,
                                                     const std::vector<double>& optimum_values,
                                                     const std::vector<double>& d_prev,
                                                     const DomainReductionConfig& cfg,
                                                     const DesignSpace& space,
                                                     const Region& initial_region) {
  const int n = region.dim();
  if (static_cast<int>(optimum_values.size()) != n)
    throw Error("reduce_domain: dimension mismatch");

  Region next;
  next.center.resize(n);
  next.half_range.resize(n);
  std::vector<double> d(n, 0.0);

  for (int i = 0; i < n; ++i) {
    d[i] = std::clamp((optimum_values[i] - region.center[i]) / region.half_range[i], -1.0, 1.0);
    const bool oscillating = !d_prev.empty() && d[i] * d_prev[i] < 0.0;

    double gamma;
    if (oscillating)
      gamma = cfg.gamma_osc;
    else if (std::abs(d[i]) >= cfg.pan_threshold)
      gamma = cfg.gamma_pan;
    else
      gamma = cfg.gamma_shrink;

    const auto& var = space.sampled(i);
    if (var.kind == VarKind::Discrete) {
      // Discrete axes keep their full range: a shrunk box could exclude
      // every admissible level.
      next.center[i] = initial_region.center[i];
      next.half_range[i] = initial_region.half_range[i];
      d[i] = 0.0;
      continue;
    }

    double half = region.half_range[i] * gamma;
    const double floor = cfg.resolution_floor * 2.0 * initial_region.half_range[i];
    half = std::max(half, floor);
    half = std::min(half, initial_region.half_range[i]);

    double center = optimum_values[i];
    const double lo = initial_region.lo(i) + half;
    const double hi = initial_region.hi(i) - half;
    center = std::clamp(center, lo, hi);

    next.center[i] = center;
    next.half_range[i] = half;
  }
  return {next, d};
}

// ---------------------------------------------------------------------------

Runner::Runner(DesignSpace space, std::shared_ptr<const Evaluator> evaluator,
               ObjectiveSpec objective, std::vector<ConstraintSpec> constraints,
               RunSettings settings, std::filesystem::path run_dir,
               std::vector<double> baseline_values, std::map<std::string, Curve> targets)
    : space_(std::move(space)),
      evaluator_(std::move(evaluator)),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      settings_(settings),
      run_dir_(std::move(run_dir)),
      targets_(std::move(targets)) {
  space_.validate();
  settings_.termination.validate();
  if (settings_.samples_per_iteration < 1) throw Error("samples_per_iteration must be >= 1");
  initial_region_ = Region::full(space_);
  region_ = initial_region_;

  const auto baseline_point = resolve_dependents(baseline_values, space_);
  const auto report = check_sampling_constraints(baseline_point, space_);
  if (!report.feasible)
    throw Error("baseline design violates sampling constraints (" +
                report.violations.front().name + ")");
  result_.baseline = evaluate_design(baseline_values, 0);
  if (!result_.baseline.responses.ok)
    throw Error("baseline evaluation failed: " + result_.baseline.responses.reason);
  update_best();
}

EvaluatedDesign Runner::make_evaluated(DesignPoint point) const {
  EvaluatedDesign d;
  d.point = std::move(point);
  ResponseSet rs = evaluator_->evaluate(d.point);
  // Curve-matching objectives may need the target comparison applied here
  // when the evaluator does not produce mse scalars itself.
  if (rs.ok && !targets_.empty()) {
    bool missing = false;
    for (const auto& term : objective_.terms)
      if (!rs.scalars.count(term.response)) missing = true;
    if (missing) add_curve_mse_scalars(rs, targets_);
  }
  d.responses = std::move(rs);
  if (!d.responses.ok) return d;

  try {
    d.objective = objective_.evaluate(d.responses.scalars);
    d.violations = evaluate_constraints(d.responses.scalars, constraints_);
  } catch (const Error& e) {
    d.responses = ResponseSet::failure(std::string("missing_response:") + e.what());
    d.objective = std::numeric_limits<double>::quiet_NaN();
    return d;
  }
  if (!std::isfinite(d.objective)) {
    d.responses = ResponseSet::failure("non_finite_objective");
    return d;
  }
  d.violations.push_back(check_sampling_constraints(d.point, space_).total_scaled_violation());
  d.feasible = feasible_from_violations(d.violations);
  // Raw curves are no longer needed once the scalar table is complete; this
  // keeps memory flat and makes resumed state equivalent to in-memory state.
  d.responses.curves.clear();
  return d;
}

EvaluatedDesign Runner::evaluate_design(const std::vector<double>& values, int iteration) {
  DesignPoint p = resolve_dependents(values, space_);
  p.id = next_id_++;
  p.iteration = iteration;
  return make_evaluated(std::move(p));
}

std::vector<std::string> Runner::response_names_to_fit() const {
  std::set<std::string> names;
  for (const auto& t : objective_.terms) names.insert(t.response);
  for (const auto& c : constraints_) names.insert(c.response);
  return {names.begin(), names.end()};
}

void Runner::update_best() {
  const EvaluatedDesign* best = nullptr;
  auto better = [](const EvaluatedDesign& a, const EvaluatedDesign* b) {
    if (!b) return true;
    if (a.feasible != b->feasible) return a.feasible;
    if (a.feasible) return a.objective < b->objective;
    double va = 0.0, vb = 0.0;
    for (double v : a.violations) va += v;
    for (double v : b->violations) vb += v;
    return va < vb;
  };
  if (result_.baseline.responses.ok && better(result_.baseline, best)) best = &result_.baseline;
  for (const auto& d : all_points_)
    if (d.responses.ok && better(d, best)) best = &d;
  if (best) result_.best = *best;

  const double base = result_.baseline.objective;
  if (result_.best.responses.ok && std::isfinite(base) && base != 0.0)
    result_.improvement_percent = (base - result_.best.objective) / std::abs(base) * 100.0;
  else
    result_.improvement_percent = 0.0;
}

IterationRecord Runner::run_iteration() {
  IterationRecord rec;
  rec.k = static_cast<int>(result_.history.size()) + 1;
  rec.region = region_;

  // Sampling stage: prior evaluated designs inside the region are fixed sites.
  std::vector<DesignPoint> prior;
  prior.push_back(result_.baseline.point);
  for (const auto& d : all_points_) prior.push_back(d.point);
  auto constraints_fn = [this](const DesignPoint& p) {
    return check_sampling_constraints(p, space_);
  };
  SamplerConfig sampler = settings_.sampler;
  SamplePlan plan =
      maximin_fill(region_, space_, settings_.samples_per_iteration, prior, constraints_fn,
                   substream_seed(settings_.seed, "sampling", rec.k), sampler);
  rec.prior_ids = plan.prior_points_used;

  // Evaluation stage (concurrent; failures become data).
  std::vector<EvaluatedDesign> evaluated(plan.points.size());
  for (auto& p : plan.points) {
    p.id = next_id_++;
    p.iteration = rec.k;
  }
  parallel_for(plan.points.size(), settings_.parallelism, [&](std::size_t i) {
    evaluated[i] = make_evaluated(plan.points[i]);
  });

  int n_ok = 0;
  std::map<std::string, int> failures;
  for (auto& d : evaluated) {
    rec.sample_ids.push_back(d.point.id);
    if (d.responses.ok)
      ++n_ok;
    else
      ++failures[d.responses.reason];
    rec.samples.push_back(d);
    all_points_.push_back(std::move(d));
  }
  if (n_ok == 0) {
    persist();
    std::string diag;
    for (const auto& [reason, count] : failures)
      diag += " " + reason + " x" + std::to_string(count);
    throw Error("iteration " + std::to_string(rec.k) + ": all evaluations failed:" + diag);
  }

  // Metamodel stage: fit over accumulated points near the current region.
  const auto names = response_names_to_fit();
  std::vector<const EvaluatedDesign*> fit_points;
  auto in_window = [&](const DesignPoint& p) {
    for (int i = 0; i < region_.dim(); ++i) {
      const double offset = std::abs(p.values[i] - region_.center[i]);
      if (offset > settings_.reuse_window * region_.half_range[i] + 1e-12) return false;
    }
    return true;
  };
  auto has_all_names = [&](const EvaluatedDesign& d) {
    for (const auto& n : names)
      if (!d.responses.scalars.count(n)) return false;
    return true;
  };
  std::vector<std::vector<double>> coords;
  auto try_add = [&](const EvaluatedDesign& d) {
    if (!d.responses.ok || !has_all_names(d) || !in_window(d.point)) return;
    const auto u = normalize(d.point.values, region_);
    for (const auto& c : coords) {
      double dist2 = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) dist2 += (c[i] - u[i]) * (c[i] - u[i]);
      if (dist2 == 0.0) return;  // duplicate center
    }
    coords.push_back(u);
    fit_points.push_back(&d);
  };
  if (result_.baseline.responses.ok) try_add(result_.baseline);
  for (const auto& d : all_points_) try_add(d);
  if (fit_points.size() < 2)
    throw Error("iteration " + std::to_string(rec.k) + ": not enough points to fit metamodels");

  std::map<std::string, RBFModel> models;
  for (const auto& name : names) {
    std::vector<double> y;
    y.reserve(fit_points.size());
    for (const auto* d : fit_points) y.push_back(d->responses.scalars.at(name));
    RBFModel model = fit_rbf(coords, y, ShapePolicy{}, name);
    rec.model_stats.push_back({name, static_cast<int>(coords.size()), model.shape_c,
                               model.fit_stats.max_training_residual, model.fit_stats.loo_rms,
                               model.fit_stats.ridge_used});
    models[name] = std::move(model);
  }
  for (const auto* d : fit_points) rec.fit_ids.push_back(d->point.id);

  // Optimization stage on the metamodels.
  OptimizerConfig opt_cfg = settings_.optimizer;
  opt_cfg.seed = substream_seed(settings_.seed, "ga", rec.k);
  const auto problem = make_metamodel_problem(models, objective_, constraints_, space_, region_);
  rec.predicted = hybrid_optimize(problem, space_, region_, opt_cfg);
  rec.models = std::move(models);

  // Verification: one true evaluation at the predicted optimum.
  EvaluatedDesign verified = evaluate_design(rec.predicted.point.values, rec.k);
  all_points_.push_back(verified);
  if (!verified.responses.ok) {
    // Fall back to the best evaluated sample of this iteration so f_k stays
    // a true-evaluator value.
    const EvaluatedDesign* fallback = nullptr;
    for (const auto& d : all_points_) {
      if (d.point.iteration != rec.k || !d.responses.ok) continue;
      if (!fallback || (d.feasible && !fallback->feasible) ||
          (d.feasible == fallback->feasible && d.objective < fallback->objective))
        fallback = &d;
    }
    if (!fallback)
      throw Error("iteration " + std::to_string(rec.k) +
                  ": optimum verification failed and no sample is usable");
    verified = *fallback;
    rec.verified_from_sample = true;
  }
  rec.verified = verified;
  rec.f_k = verified.objective;

  result_.history.push_back(rec);
  rec.termination = check_termination(result_.history, settings_.termination, initial_region_);
  result_.history.back().termination = rec.termination;
  update_best();
  return rec;
}

void Runner::persist() {
  if (run_dir_.empty()) return;
  if (!result_.history.empty()) save_iteration(run_dir_, result_.history.back());
  RunLevelState state;
  state.baseline = result_.baseline;
  state.current_region = region_;
  state.d_prev = d_prev_;
  state.next_id = next_id_;
  state.finished = result_.finished;
  state.termination_reason = result_.termination_reason;
  save_run_state(run_dir_, state);
  write_history_csv(run_dir_, result_.baseline, result_.history, initial_region_);
  write_best_design_json(run_dir_, result_);
  write_convergence_svg(run_dir_, result_.baseline, result_.history, initial_region_);
}

bool Runner::load_state() {
  auto state = load_run_state(run_dir_);
  if (!state) return false;
  result_ = RunResult{};
  result_.baseline = state->baseline;
  result_.finished = state->finished;
  result_.termination_reason = state->termination_reason;
  region_ = state->current_region;
  d_prev_ = state->d_prev;
  next_id_ = state->next_id;

  all_points_ = {};
  result_.history = load_iterations(run_dir_);
  // Rebuild the evaluated-point table in id order (== evaluation order).
  std::map<long, EvaluatedDesign> by_id;
  for (const auto& rec : result_.history) {
    for (const auto& s : rec.samples) by_id[s.point.id] = s;
    by_id[rec.verified.point.id] = rec.verified;
  }
  for (auto& [id, d] : by_id) all_points_.push_back(std::move(d));
  update_best();
  return true;
}

RunResult Runner::run(int session_iteration_limit) {
  RunLock lock(run_dir_);
  int done_this_session = 0;
  while (!result_.finished) {
    if (session_iteration_limit >= 0 && done_this_session >= session_iteration_limit) break;
    IterationRecord rec = run_iteration();
    ++done_this_session;
    if (rec.termination.stop) {
      result_.finished = true;
      result_.termination_reason = rec.termination.reason;
      persist();
      break;
    }
    auto [next_region, d] =
        reduce_domain(region_, rec.verified.point.values, d_prev_, settings_.reduction, space_,
                      initial_region_);
    region_ = next_region;
    d_prev_ = d;
    result_.history.back().d_vector = d;
    persist();
  }
  return result_;
}

} // namespace srsm
