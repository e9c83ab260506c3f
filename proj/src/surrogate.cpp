#include "srsm/surrogate.hpp"

#include "srsm/util.hpp"

#include <Eigen/Dense>

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

double default_shape(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) return 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) nearest = std::min(nearest, dist2(points[i], points[j]));
    sum += std::sqrt(nearest);
  }
  return sum / static_cast<double>(n);
}

// Bordered multiquadric system with a polynomial tail:
//   [ Phi  P ] [w]   [y]
//   [ P^T  0 ] [p] = [0]
// P is [1] for the constant tail and [1 x] for the linear tail. The tail
// makes constant (and, when linear, affine) responses exact everywhere,
// which keeps the interpolant affine-equivariant in y and gives sensible
// extrapolation at the region edges.
Eigen::MatrixXd bordered_matrix(const std::vector<std::vector<double>>& points, double c,
                                int tail_cols, double ridge) {
  const int n = static_cast<int>(points.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + tail_cols, n + tail_cols);
  const double c2 = c * c;
  for (int i = 0; i < n; ++i) {
    k(i, i) = std::sqrt(c2) + ridge;
    for (int j = i + 1; j < n; ++j) {
      const double v = std::sqrt(dist2(points[i], points[j]) + c2);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, n) = 1.0;
    k(n, i) = 1.0;
    for (int t = 1; t < tail_cols; ++t) {
      k(i, n + t) = points[i][t - 1];
      k(n + t, i) = points[i][t - 1];
    }
  }
  return k;
}

struct Solved {
  Eigen::VectorXd solution;
  double condition = 0.0;
  bool ridge_used = false;
  Eigen::MatrixXd inverse;  // for the closed-form leave-one-out residuals
  bool ok = false;
};

Solved solve_bordered(const std::vector<std::vector<double>>& points, double c, int tail_cols,
                      const std::vector<double>& responses) {
  const int n = static_cast<int>(points.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + tail_cols);
  for (int i = 0; i < n; ++i) rhs(i) = responses[i];

  Solved out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered_matrix(points, c, tail_cols, 0.0));
  const double rcond = lu.rcond();
  out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(out.condition < 1e12)) {
    const double lambda = 1e-10 * c;  // trace(Phi)/N for the multiquadric block
    lu.compute(bordered_matrix(points, c, tail_cols, lambda));
    out.ridge_used = true;
  }
  out.solution = lu.solve(rhs);
  out.ok = out.solution.allFinite();
  if (out.ok) out.inverse = lu.inverse();
  if (out.ok && !out.inverse.allFinite()) out.ok = false;
  return out;
}

} // namespace

RBFModel fit_rbf(const std::vector<std::vector<double>>& points,
                 const std::vector<double>& responses, const ShapePolicy& shape,
                 const std::string& response_name) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw Error("fit_rbf: no points");
  if (responses.size() != points.size()) throw Error("fit_rbf: points/responses size mismatch");
  const int d = static_cast<int>(points.front().size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist2(points[i], points[j]) == 0.0)
        throw Error("fit_rbf: duplicate centers at indices " + std::to_string(i) + "," +
                    std::to_string(j));

  RBFModel model;
  model.centers = points;
  model.response_name = response_name;
  model.shape_c = shape.override_c > 0.0 ? shape.override_c : default_shape(points);

  // Linear tail when the point count allows it (n >= d+1 is exactly the
  // unisolvency requirement); degenerate layouts fall back to the constant
  // tail.
  int tail_cols = n >= d + 1 ? d + 1 : 1;
  Solved solved = solve_bordered(points, model.shape_c, tail_cols, responses);
  if (!solved.ok && tail_cols > 1) {
    tail_cols = 1;
    solved = solve_bordered(points, model.shape_c, tail_cols, responses);
  }
  if (!solved.ok) throw Error("fit_rbf: singular interpolation system for " + response_name);

  model.fit_stats.condition_estimate = solved.condition;
  model.fit_stats.ridge_used = solved.ridge_used;
  model.weights.assign(solved.solution.data(), solved.solution.data() + n);
  model.bias = solved.solution(n);
  model.linear_tail.assign(tail_cols - 1, 0.0);
  for (int t = 1; t < tail_cols; ++t) model.linear_tail[t - 1] = solved.solution(n + t);

  for (int i = 0; i < n; ++i)
    model.fit_stats.max_training_residual = std::max(
        model.fit_stats.max_training_residual, std::abs(predict(model, points[i]) - responses[i]));

  // Rippa's closed form on the bordered system: the leave-one-out residual at
  // point i equals w_i / (K^-1)_ii.
  if (n >= 2) {
    double ss = 0.0;
    bool valid = true;
    for (int i = 0; i < n; ++i) {
      const double dii = solved.inverse(i, i);
      if (dii == 0.0 || !std::isfinite(dii)) {
        valid = false;
        break;
      }
      const double e = solved.solution(i) / dii;
      ss += e * e;
    }
    model.fit_stats.loo_rms = valid ? std::sqrt(ss / n) : std::numeric_limits<double>::quiet_NaN();
  }
  return model;
}

double predict(const RBFModel& model, const std::vector<double>& point) {
  if (model.dim() != 0 && static_cast<int>(point.size()) != model.dim())
    throw Error("predict: dimension mismatch");
  const double c2 = model.shape_c * model.shape_c;
  double s = model.bias;
  for (std::size_t t = 0; t < model.linear_tail.size(); ++t) s += model.linear_tail[t] * point[t];
  for (std::size_t i = 0; i < model.centers.size(); ++i)
    s += model.weights[i] * std::sqrt(dist2(model.centers[i], point) + c2);
  return s;
}

bool inside_unit_box(const std::vector<double>& point, double tol) {
  for (double v : point)
    if (v < -tol || v > 1.0 + tol) return false;
  return true;
}

double loo_error(const std::vector<std::vector<double>>& points,
                 const std::vector<double>& responses, const ShapePolicy& shape) {
  if (points.size() < 3) throw Error("loo_error: needs at least 3 points");
  return fit_rbf(points, responses, shape).fit_stats.loo_rms;
}

} // namespace srsm
