#include "srsm/problem.hpp"

#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>

namespace srsm {

double Curve::at_time(double t) const {
  if (values.empty()) throw Error("empty curve: " + quantity);
  if (t <= 0.0) return values.front();
  const double pos = t / dt;
  const auto i = static_cast<std::size_t>(pos);
  if (i >= values.size() - 1) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

Curve slice_from(const Curve& curve, double t0) {
  Curve out;
  out.dt = curve.dt;
  out.quantity = curve.quantity;
  out.units = curve.units;
  const double eps = 1e-9 * std::max(curve.dt, 1.0);
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    if (curve.time_at(i) >= t0 - eps) out.values.push_back(curve.values[i]);
  return out;
}

double ObjectiveSpec::evaluate(const std::map<std::string, double>& scalars) const {
  double total = 0.0;
  for (const auto& term : terms) {
    auto it = scalars.find(term.response);
    if (it == scalars.end()) throw Error("objective references missing response: " + term.response);
    total += term.weight * (term.absolute ? std::abs(it->second) : it->second);
  }
  return total;
}

double ConstraintSpec::effective_scale() const {
  if (scale > 0.0) return scale;
  return bound == 0.0 ? 1.0 : std::abs(bound);
}

double ConstraintSpec::violation(double value) const {
  const double s = effective_scale();
  if (direction == ConstraintDirection::LessEqual) return std::max(0.0, (value - bound) / s);
  return std::max(0.0, (bound - value) / s);
}

double objective_eq1(const std::map<std::string, double>& responses, double w1, double w2) {
  auto sub = responses.find("d_subsidence");
  auto exp = responses.find("d_expulsion");
  if (sub == responses.end()) throw Error("objective_eq1: missing d_subsidence");
  if (exp == responses.end()) throw Error("objective_eq1: missing d_expulsion");
  return w1 * std::abs(sub->second) + w2 * std::abs(exp->second);
}

double objective_eq2(const std::vector<double>& mse_values, const std::vector<double>& weights) {
  if (mse_values.size() != weights.size())
    throw Error("objective_eq2: got " + std::to_string(mse_values.size()) + " errors but " +
                std::to_string(weights.size()) + " weights");
  double total = 0.0;
  for (std::size_t i = 0; i < mse_values.size(); ++i) total += weights[i] * mse_values[i];
  return total;
}

double curve_mse(const Curve& candidate, const Curve& target) {
  if (candidate.values.empty() || target.values.empty()) throw Error("curve_mse: empty curve");
  if (!candidate.quantity.empty() && !target.quantity.empty() &&
      candidate.quantity != target.quantity)
    throw Error("curve_mse: quantity mismatch: " + candidate.quantity + " vs " + target.quantity);

  const std::size_t n = target.values.size();
  double se = 0.0;
  double target_sq = 0.0;
  const bool same_grid = candidate.values.size() == n && candidate.dt == target.dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = target.values[i];
    const double c = same_grid ? candidate.values[i] : candidate.at_time(target.time_at(i));
    const double d = c - t;
    se += d * d;
    target_sq += t * t;
  }
  const double norm = std::max(target_sq / n, 1e-12);
  return (se / n) / norm;
}

std::vector<double> evaluate_constraints(const std::map<std::string, double>& responses,
                                         const std::vector<ConstraintSpec>& specs) {
  std::vector<double> violations;
  violations.reserve(specs.size());
  for (const auto& spec : specs) {
    auto it = responses.find(spec.response);
    if (it == responses.end()) throw Error("constraint references missing response: " + spec.response);
    violations.push_back(spec.violation(it->second));
  }
  return violations;
}

bool feasible_from_violations(const std::vector<double>& violations, double tol) {
  for (double v : violations)
    if (v > tol) return false;
  return true;
}

std::vector<std::string> canonical_curve_names() {
  std::vector<std::string> names;
  for (const char* motion : {"flexion", "extension", "lateral_bending", "axial_rotation"})
    for (const char* quantity :
         {"strain_capsular", "strain_interspinal", "strain_flavum", "force_facet"})
      names.push_back(std::string(quantity) + "_" + motion);
  return names;
}

DoeCalibration calibrate_weights_doe(
    const std::function<std::map<std::string, double>(const DesignPoint&)>& eval_scalars,
    const DesignSpace& space, int n, std::uint64_t seed, const SamplerConfig& sampler) {
  if (n < 1) throw Error("calibrate_weights_doe: n must be >= 1");
  auto constraints = [&space](const DesignPoint& p) { return check_sampling_constraints(p, space); };
  const auto plan = maximin_fill(Region::full(space), space, n, {}, constraints, seed, sampler);

  DoeCalibration cal;
  cal.n_requested = n;
  double sum_sub = 0.0;
  double sum_exp = 0.0;
  for (const auto& point : plan.points) {
    const auto scalars = eval_scalars(point);
    if (scalars.empty()) continue;  // failed evaluation
    auto sub = scalars.find("d_subsidence");
    auto exp = scalars.find("d_expulsion");
    if (sub == scalars.end() || exp == scalars.end())
      throw Error("calibration evaluator must produce d_subsidence and d_expulsion");
    sum_sub += std::abs(sub->second);
    sum_exp += std::abs(exp->second);
    ++cal.n_used;
  }
  if (cal.n_used == 0) throw Error("weight calibration degenerate: all evaluations failed");
  cal.mean_abs_subsidence = sum_sub / cal.n_used;
  cal.mean_abs_expulsion = sum_exp / cal.n_used;
  if (cal.mean_abs_expulsion == 0.0)
    throw Error("weight calibration degenerate: mean |d_expulsion| is zero");
  cal.w1 = 1.0;
  cal.w2 = cal.mean_abs_subsidence / cal.mean_abs_expulsion;
  return cal;
}

} // namespace srsm
