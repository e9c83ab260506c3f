#pragma once

#include <string>
#include <vector>

namespace srsm {

struct ShapePolicy {
  /// Explicit shape parameter; <= 0 means "mean nearest-neighbor distance
  /// among the centers" (1.0 for a single center).
  double override_c = 0.0;
};

struct FitStats {
  double max_training_residual = 0.0;
  double loo_rms = 0.0;      // leave-one-out RMS (Rippa's closed form)
  bool ridge_used = false;
  double condition_estimate = 0.0;
};

/// Multiquadric RBF interpolant of one scalar response over normalized
/// coordinates: s(x) = bias + l.x + sum_i w_i * sqrt(|x - x_i|^2 + c^2),
/// with the moment side conditions of the polynomial tail (sum w = 0 and,
/// when the linear tail is active, sum w*x = 0).
struct RBFModel {
  std::vector<std::vector<double>> centers;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> linear_tail;  // empty when only the constant tail fits
  double shape_c = 1.0;
  std::string response_name;
  FitStats fit_stats;

  int dim() const { return centers.empty() ? 0 : static_cast<int>(centers.front().size()); }
};

/// Interpolates `responses` at `points`. Solves the dense bordered
/// multiquadric system with partial-pivoting LU; when the condition estimate
/// exceeds 1e12 a ridge term lambda = 1e-10 * trace(Phi)/N is added to the
/// radial block diagonal.
/// Throws Error on duplicate centers or a singular system after the ridge.
RBFModel fit_rbf(const std::vector<std::vector<double>>& points,
                 const std::vector<double>& responses, const ShapePolicy& shape = ShapePolicy{},
                 const std::string& response_name = "");

double predict(const RBFModel& model, const std::vector<double>& point);

/// True when every coordinate lies in [0,1]; predictions outside are
/// extrapolations and get flagged in reports.
bool inside_unit_box(const std::vector<double>& point, double tol = 1e-9);

/// Leave-one-out RMS prediction error (refit semantics, computed in closed
/// form from the factorized system). Needs >= 3 points.
double loo_error(const std::vector<std::vector<double>>& points,
                 const std::vector<double>& responses, const ShapePolicy& shape = ShapePolicy{});

} // namespace srsm
