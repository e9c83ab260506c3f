#include "srsm/optimizer.hpp"

#include "srsm/rng.hpp"
#include "srsm/util.hpp"

#include <doctest.h>

#include <cmath>

using namespace srsm;

namespace {

DesignSpace cube(int d, double lo = 0.0, double hi = 1.0) {
  DesignSpace s;
  s.preset = "custom";
  for (int i = 0; i < d; ++i) {
    VariableSpec v;
    v.name = "x" + std::to_string(i);
    v.lower = lo;
    v.upper = hi;
    s.variables.push_back(v);
  }
  return s;
}

NormalizedProblem unconstrained(int d, ObjectiveFn f) {
  NormalizedProblem p;
  p.dim = d;
  p.objective = std::move(f);
  p.discrete_levels.assign(d, {});
  return p;
}

OptimizerConfig small_config(std::uint64_t seed, int pop = 40, int gens = 60) {
  OptimizerConfig cfg;
  cfg.population = pop;
  cfg.generations = gens;
  cfg.seed = seed;
  return cfg;
}

} // namespace

TEST_CASE("penalized objective") {
  CHECK(penalized_value(1.0, {}, 1e3) == 1.0);
  CHECK(penalized_value(1.0, {0.0, 0.0}, 1e3) == 1.0);
  CHECK(penalized_value(1.0, {0.5}, 1e3) == doctest::Approx(251.0));

  // Equal objective, one feasible one not: the feasible point ranks better.
  CHECK(penalized_value(2.0, {0.0}, 1e3) < penalized_value(2.0, {0.1}, 1e3));
}

TEST_CASE("GA finds the minimum of a quadratic bowl") {
  auto f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += (v - 0.3) * (v - 0.3);
    return s;
  };
  const auto res = ga_minimize(unconstrained(3, f), small_config(5, 100, 120));
  double dist = 0.0;
  for (double v : res.best_x) dist += (v - 0.3) * (v - 0.3);
  CHECK(std::sqrt(dist) < 0.02);
}

TEST_CASE("GA on a constant function returns the constant") {
  auto f = [](const std::vector<double>&) { return 4.2; };
  const auto res = ga_minimize(unconstrained(2, f), small_config(1));
  CHECK(res.best_penalized == doctest::Approx(4.2));
}

TEST_CASE("GA elitism is monotone") {
  auto f = [](const std::vector<double>& x) {
    return std::sin(7.0 * x[0]) + x[1] * x[1] + 0.3 * std::cos(11.0 * x[1]);
  };
  const auto res = ga_minimize(unconstrained(2, f), small_config(9));
  for (std::size_t i = 1; i < res.best_history.size(); ++i)
    CHECK(res.best_history[i] <= res.best_history[i - 1] + 1e-12);
}

TEST_CASE("GA determinism per seed") {
  auto f = [](const std::vector<double>& x) { return x[0] * x[0] + std::cos(9.0 * x[1]); };
  const auto a = ga_minimize(unconstrained(2, f), small_config(77));
  const auto b = ga_minimize(unconstrained(2, f), small_config(77));
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_penalized == b.best_penalized);
  const auto c = ga_minimize(unconstrained(2, f), small_config(78));
  CHECK(a.best_x != c.best_x);
}

TEST_CASE("gradient refinement") {
  SUBCASE("starting at the minimum stays put") {
    auto f = [](const std::vector<double>& x) { return (x[0] - 0.5) * (x[0] - 0.5); };
    const auto res = gradient_refine(f, {0.5}, {}, 100, 1e-6);
    CHECK(res.x[0] == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("converges to an interior analytic minimum") {
    auto f = [](const std::vector<double>& x) { return (x[0] - 0.7) * (x[0] - 0.7); };
    const auto res = gradient_refine(f, {0.2}, {}, 200, 1e-8);
    CHECK(std::abs(res.x[0] - 0.7) <= 1e-4);
  }

  SUBCASE("projects onto the box when the minimum is outside") {
    auto f = [](const std::vector<double>& x) { return (x[0] - 1.5) * (x[0] - 1.5); };
    const auto res = gradient_refine(f, {0.2}, {}, 200, 1e-8);
    CHECK(res.x[0] == doctest::Approx(1.0));
  }

  SUBCASE("frozen dims never move") {
    auto f = [](const std::vector<double>& x) {
      return (x[0] - 0.9) * (x[0] - 0.9) + (x[1] - 0.9) * (x[1] - 0.9);
    };
    const auto res = gradient_refine(f, {0.2, 0.2}, {false, true}, 200, 1e-8);
    CHECK(std::abs(res.x[0] - 0.9) <= 1e-3);
    CHECK(res.x[1] == 0.2);
  }
}

TEST_CASE("hybrid optimization on a quadratic bowl") {
  const auto space = cube(2);
  const Region region = Region::full(space);
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 0.62) * (x[0] - 0.62) + (x[1] - 0.37) * (x[1] - 0.37);
  };
  const auto report =
      hybrid_optimize(make_direct_problem(f, nullptr, space, region), space, region,
                      small_config(3, 60, 80));
  CHECK(report.feasible);
  CHECK(std::abs(report.normalized[0] - 0.62) <= 1e-3);
  CHECK(std::abs(report.normalized[1] - 0.37) <= 1e-3);
  CHECK(report.refined_gain >= 0.0);
  CHECK(report.ga_best >= report.predicted_objective - 1e-12);
}

TEST_CASE("hybrid optimization against a dense grid oracle on a multimodal function") {
  // 2-D function with three local minima; the oracle is a 400x400 grid scan.
  auto f = [](const std::vector<double>& x) {
    const double a = x[0], b = x[1];
    return std::sin(3.0 * M_PI * a) * std::sin(3.0 * M_PI * a) +
           (a - 1.0) * (a - 1.0) * (1.0 + std::sin(3.0 * M_PI * b) * std::sin(3.0 * M_PI * b)) +
           0.5 * (b - 0.4) * (b - 0.4);
  };
  double oracle = 1e300;
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < 400; ++j)
      oracle = std::min(oracle, f({i / 399.0, j / 399.0}));

  const auto space = cube(2);
  const Region region = Region::full(space);
  const auto report = hybrid_optimize(make_direct_problem(f, nullptr, space, region), space,
                                      region, small_config(11, 100, 150));
  CHECK(report.predicted_objective <= oracle + 1e-2);
}

TEST_CASE("infeasible-everywhere constraint reports the minimal-violation point") {
  const auto space = cube(1);
  const Region region = Region::full(space);
  auto f = [](const std::vector<double>&) { return 1.0; };
  auto viol = [](const std::vector<double>& x) {
    // x0 <= -1 on [0,1]: violation (x0+1), minimized at x0 = 0.
    return std::vector<double>{x[0] + 1.0};
  };
  const auto report = hybrid_optimize(make_direct_problem(f, viol, space, region), space, region,
                                      small_config(21, 40, 120));
  CHECK_FALSE(report.feasible);
  CHECK(report.normalized[0] <= 0.02);
}

TEST_CASE("feasibility soundness of the report") {
  const auto space = cube(2);
  const Region region = Region::full(space);

  SUBCASE("inactive constraint: feasible report") {
    // The unconstrained minimum (0.8, 0.2) already satisfies x0 >= 0.5.
    auto f = [](const std::vector<double>& x) {
      return (x[0] - 0.8) * (x[0] - 0.8) + (x[1] - 0.2) * (x[1] - 0.2);
    };
    auto viol = [](const std::vector<double>& x) {
      return std::vector<double>{std::max(0.0, 0.5 - x[0])};
    };
    const auto report = hybrid_optimize(make_direct_problem(f, viol, space, region), space, region,
                                        small_config(31));
    bool all_small = true;
    for (double v : report.scaled_violations) all_small = all_small && v <= 1e-9;
    CHECK(report.feasible == all_small);
    CHECK(report.feasible);
    CHECK(report.normalized[0] >= 0.5 - 1e-9);
  }

  SUBCASE("active constraint: the exterior penalty sits just outside and the report says so") {
    auto f = [](const std::vector<double>& x) { return x[0] + x[1]; };
    auto viol = [](const std::vector<double>& x) {
      return std::vector<double>{std::max(0.0, 0.5 - x[0])};
    };
    const auto report = hybrid_optimize(make_direct_problem(f, viol, space, region), space, region,
                                        small_config(32));
    CHECK(std::abs(report.normalized[0] - 0.5) <= 0.01);
    bool all_small = true;
    for (double v : report.scaled_violations) all_small = all_small && v <= 1e-9;
    CHECK(report.feasible == all_small);
  }
}

TEST_CASE("weighted-displacement objective over fitted metamodels lands on the right corner") {
  // Linear synthetic responses: d_subsidence = 0.2 + 0.5*x0, d_expulsion =
  // 0.1 + 0.3*x1 (both positive over the box). The weighted objective
  // 1*|sub| + 2*|exp| is minimized at the (0,0) corner of the region.
  const auto space = cube(2);
  const Region region = Region::full(space);

  Rng rng(64);
  std::vector<std::vector<double>> pts;
  std::vector<double> sub, exp;
  for (int i = 0; i < 25; ++i) {
    pts.push_back({rng.uniform(), rng.uniform()});
    sub.push_back(0.2 + 0.5 * pts.back()[0]);
    exp.push_back(0.1 + 0.3 * pts.back()[1]);
  }
  std::map<std::string, RBFModel> models;
  models["d_subsidence"] = fit_rbf(pts, sub, ShapePolicy{}, "d_subsidence");
  models["d_expulsion"] = fit_rbf(pts, exp, ShapePolicy{}, "d_expulsion");

  ObjectiveSpec objective;
  objective.terms = {{"d_subsidence", 1.0, true}, {"d_expulsion", 2.0, true}};
  const auto problem = make_metamodel_problem(models, objective, {}, space, region);
  const auto report = hybrid_optimize(problem, space, region, small_config(71, 60, 80));

  CHECK(report.normalized[0] <= 0.02);
  CHECK(report.normalized[1] <= 0.02);
  CHECK(report.predicted_objective == doctest::Approx(0.2 + 2.0 * 0.1).epsilon(0.05));
}

TEST_CASE("discrete genes stay on levels and freeze during refinement") {
  DesignSpace s = cube(1);
  VariableSpec n;
  n.name = "n";
  n.kind = VarKind::Discrete;
  n.levels = {2, 3};
  n.lower = 2;
  n.upper = 3;
  s.variables.push_back(n);
  const Region region = Region::full(s);

  // Optimum prefers n = 3 and x0 = 0.25.
  auto f = [&region, &s](const std::vector<double>& u) {
    const auto v = denormalize(u, region, s);
    return (v[0] - 0.25) * (v[0] - 0.25) + (v[1] == 3.0 ? 0.0 : 1.0);
  };
  const auto report = hybrid_optimize(make_direct_problem(f, nullptr, s, region), s, region,
                                      small_config(41, 60, 80));
  CHECK(report.point.get("n") == 3.0);
  CHECK(std::abs(report.point.get("x0") - 0.25) <= 5e-3);
}

TEST_CASE("adaptive penalty escalates while infeasible") {
  // Objective pulls toward x = 0 against the constraint x >= 0.9. With a
  // penalty factor of 1 the penalized optimum sits at x = 0; each doubling
  // moves it toward the feasible side (x* = 0.9 - 10/(2*factor)).
  const auto space = cube(1);
  auto f = [](const std::vector<double>& x) { return 10.0 * x[0]; };
  auto viol = [](const std::vector<double>& x) {
    return std::vector<double>{std::max(0.0, 0.9 - x[0])};
  };
  NormalizedProblem p = make_direct_problem(f, viol, space, Region::full(space));
  OptimizerConfig cfg = small_config(51, 40, 220);
  cfg.penalty_factor = 1.0;
  const auto res = ga_minimize(p, cfg);
  CHECK(res.final_penalty_factor == 16.0);  // doubled at 50/100/150/200
  CHECK(res.best_x[0] == doctest::Approx(0.9 - 10.0 / (2.0 * 16.0)).epsilon(0.05));
}

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  cfg.population = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.population = 10;
  cfg.generations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
