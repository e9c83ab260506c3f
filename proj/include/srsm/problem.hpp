#pragma once

#include "srsm/sampling.hpp"
#include "srsm/space.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace srsm {

/// Uniformly sampled time series starting at t = 0 with spacing dt.
struct Curve {
  double dt = 0.010;  // seconds
  std::vector<double> values;
  std::string quantity;
  std::string units;  // "strain" or "N"

  double duration() const { return values.empty() ? 0.0 : dt * (values.size() - 1); }
  double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
  /// Linear interpolation at time t (clamped to the sampled range).
  double at_time(double t) const;
};

/// Drops samples before t0 and rebases time to zero.
Curve slice_from(const Curve& curve, double t0);

enum class ObjectiveKind { WeightedScalar, CurveMse };

struct ObjectiveTerm {
  std::string response;  // scalar response name (curve-MSE terms reference mse_* scalars)
  double weight = 1.0;
  bool absolute = false;
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::WeightedScalar;
  std::vector<ObjectiveTerm> terms;

  double evaluate(const std::map<std::string, double>& scalars) const;
};

enum class ConstraintDirection { LessEqual, GreaterEqual };

struct ConstraintSpec {
  std::string response;
  double bound = 0.0;
  ConstraintDirection direction = ConstraintDirection::LessEqual;
  double scale = 0.0;  // <= 0: default |bound| (1 when bound == 0)

  double effective_scale() const;
  double violation(double value) const;  // scaled, 0 when satisfied
};

/// w1*|d_subsidence| + w2*|d_expulsion|. Throws on missing responses.
double objective_eq1(const std::map<std::string, double>& responses, double w1, double w2);

/// Weighted sum of curve-matching errors. Throws on count mismatch.
double objective_eq2(const std::vector<double>& mse_values, const std::vector<double>& weights);

/// Normalized mean square error between two curves of the same quantity.
/// The candidate is resampled onto the target timestamps by linear
/// interpolation when the grids differ; the result is divided by the target
/// mean square (floored at 1e-12).
double curve_mse(const Curve& candidate, const Curve& target);

std::vector<double> evaluate_constraints(const std::map<std::string, double>& responses,
                                         const std::vector<ConstraintSpec>& specs);

bool feasible_from_violations(const std::vector<double>& violations, double tol = 1e-9);

/// The sixteen Eq.-2 curve names in canonical order (motion-major).
std::vector<std::string> canonical_curve_names();

struct DoeCalibration {
  double w1 = 1.0;
  double w2 = 1.0;
  double mean_abs_subsidence = 0.0;
  double mean_abs_expulsion = 0.0;
  int n_requested = 0;
  int n_used = 0;
};

/// Weight calibration from a space-filling study of `n` feasible designs:
/// w1 = 1, w2 = mean|d_subsidence| / mean|d_expulsion| over the study, which
/// equalizes the mean weighted contributions of the two objectives.
/// `eval_scalars` returns the scalar responses of one design (an empty map
/// marks a failed evaluation, which is excluded from the means).
DoeCalibration calibrate_weights_doe(
    const std::function<std::map<std::string, double>(const DesignPoint&)>& eval_scalars,
    const DesignSpace& space, int n, std::uint64_t seed,
    const SamplerConfig& sampler = SamplerConfig{});

} // namespace srsm
