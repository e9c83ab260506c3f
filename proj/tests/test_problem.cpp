#include "srsm/problem.hpp"

#include "srsm/rng.hpp"
#include "srsm/util.hpp"

#include <doctest.h>

#include <cmath>

using namespace srsm;

namespace {

Curve make_curve(std::vector<double> values, double dt = 0.01, std::string quantity = "q") {
  Curve c;
  c.dt = dt;
  c.values = std::move(values);
  c.quantity = std::move(quantity);
  return c;
}

} // namespace

TEST_CASE("weighted displacement objective") {
  std::map<std::string, double> r;
  r["d_subsidence"] = -0.2;
  r["d_expulsion"] = 0.1;
  CHECK(objective_eq1(r, 1.0, 1.0) == doctest::Approx(0.3));

  r["d_subsidence"] = 0.0;
  r["d_expulsion"] = 0.0;
  CHECK(objective_eq1(r, 1.0, 1.0) == 0.0);

  r["d_subsidence"] = 0.5;
  r["d_expulsion"] = 0.02;
  CHECK(objective_eq1(r, 1.0, 10.0) == doctest::Approx(0.7));

  r.erase("d_expulsion");
  CHECK_THROWS_AS(objective_eq1(r, 1.0, 1.0), Error);
}

TEST_CASE("curve matching error") {
  SUBCASE("identical curves score zero") {
    const auto t = make_curve({0.0, 0.5, 1.0, 0.7});
    CHECK(curve_mse(t, t) == 0.0);
  }

  SUBCASE("constant 4 against constant 2 scores one") {
    const auto target = make_curve({2, 2, 2, 2});
    const auto cand = make_curve({4, 4, 4, 4});
    CHECK(curve_mse(cand, target) == doctest::Approx(1.0));
  }

  SUBCASE("unit shift of a ramp scores 0.6") {
    // mean((1,1,1)^2) / mean((0,1,2)^2) = 1 / (5/3) = 0.6
    const auto target = make_curve({0, 1, 2});
    const auto cand = make_curve({1, 2, 3});
    CHECK(curve_mse(cand, target) == doctest::Approx(0.6));
  }

  SUBCASE("resampling by linear interpolation when grids differ") {
    const auto target = make_curve({0.0, 1.0, 2.0}, 0.02);
    const auto cand = make_curve({0.0, 0.5, 1.0, 1.5, 2.0}, 0.01);  // same ramp, finer grid
    CHECK(curve_mse(cand, target) <= 1e-15);
  }

  SUBCASE("quantity mismatch and empty curves raise") {
    const auto a = make_curve({1, 2}, 0.01, "force");
    const auto b = make_curve({1, 2}, 0.01, "strain");
    CHECK_THROWS_AS(curve_mse(a, b), Error);
    CHECK_THROWS_AS(curve_mse(make_curve({}), make_curve({1})), Error);
  }

  SUBCASE("scaling a matched curve scales the error as (alpha-1)^2") {
    const auto target = make_curve({0.2, 0.9, 1.4, 1.1, 0.3});
    double ms = 0.0;
    for (double v : target.values) ms += v * v;
    ms /= target.values.size();
    for (double alpha : {0.5, 2.0}) {
      Curve cand = target;
      for (auto& v : cand.values) v *= alpha;
      const double expected = (alpha - 1.0) * (alpha - 1.0) * ms / ms;
      CHECK(curve_mse(cand, target) == doctest::Approx(expected));
    }
  }
}

TEST_CASE("slice_from drops the settling window and rebases time") {
  const auto c = make_curve({1, 2, 3, 4, 5}, 0.01);
  const auto s = slice_from(c, 0.02);
  CHECK(s.values == std::vector<double>{3, 4, 5});
  CHECK(s.dt == 0.01);
}

TEST_CASE("summed curve objective") {
  std::vector<double> values(16, 0.0);
  std::vector<double> w(16, 1.0);
  CHECK(objective_eq2(values, w) == 0.0);

  values.assign(16, 1.0);
  CHECK(objective_eq2(values, w) == doctest::Approx(16.0));

  std::vector<double> v3 = {0.5, 0.25, 0.0};
  std::vector<double> w3 = {2.0, 4.0, 1.0};
  CHECK(objective_eq2(v3, w3) == doctest::Approx(2.0));

  CHECK_THROWS_AS(objective_eq2(values, w3), Error);
}

TEST_CASE("objective homogeneity in the weights") {
  std::map<std::string, double> r{{"d_subsidence", 0.4}, {"d_expulsion", 0.15}};
  const double base = objective_eq1(r, 1.0, 3.0);
  CHECK(objective_eq1(r, 2.0, 6.0) == doctest::Approx(2.0 * base));

  ObjectiveSpec spec;
  spec.terms = {{"d_subsidence", 1.0, true}, {"d_expulsion", 3.0, true}};
  CHECK(spec.evaluate(r) == doctest::Approx(base));
}

TEST_CASE("constraint scaling and violations") {
  SUBCASE("published stress example") {
    std::map<std::string, double> r{{"sigma_max", 0.25}};
    const std::vector<ConstraintSpec> specs = {{"sigma_max", 0.3, ConstraintDirection::LessEqual, 0.0}};
    CHECK(evaluate_constraints(r, specs) == std::vector<double>{0.0});
  }

  SUBCASE("micromotion example: (0.225 - 0.150)/0.150 = 0.5") {
    std::map<std::string, double> r{{"d_micro", 0.225}};
    const std::vector<ConstraintSpec> specs = {{"d_micro", 0.150, ConstraintDirection::LessEqual, 0.0}};
    CHECK(evaluate_constraints(r, specs)[0] == doctest::Approx(0.5));
  }

  SUBCASE("value exactly at the bound has zero violation") {
    std::map<std::string, double> r{{"x", 2.0}};
    const std::vector<ConstraintSpec> le = {{"x", 2.0, ConstraintDirection::LessEqual, 0.0}};
    const std::vector<ConstraintSpec> ge = {{"x", 2.0, ConstraintDirection::GreaterEqual, 0.0}};
    CHECK(evaluate_constraints(r, le)[0] == 0.0);
    CHECK(evaluate_constraints(r, ge)[0] == 0.0);
  }

  SUBCASE("zero bound defaults to unit scale") {
    ConstraintSpec c{"x", 0.0, ConstraintDirection::LessEqual, 0.0};
    CHECK(c.effective_scale() == 1.0);
    CHECK(c.violation(0.4) == doctest::Approx(0.4));
  }

  SUBCASE("scaling all the scales by k divides violations by k") {
    std::map<std::string, double> r{{"x", 5.0}, {"y", -1.0}};
    std::vector<ConstraintSpec> specs = {{"x", 2.0, ConstraintDirection::LessEqual, 1.0},
                                         {"y", 0.5, ConstraintDirection::GreaterEqual, 2.0}};
    const auto v1 = evaluate_constraints(r, specs);
    for (auto& s : specs) s.scale *= 4.0;
    const auto v2 = evaluate_constraints(r, specs);
    for (std::size_t i = 0; i < v1.size(); ++i) {
      CHECK(v2[i] == doctest::Approx(v1[i] / 4.0));
      CHECK((v1[i] > 0) == (v2[i] > 0));
    }
  }

  SUBCASE("missing response raises") {
    CHECK_THROWS_AS(
        evaluate_constraints({}, {{"absent", 1.0, ConstraintDirection::LessEqual, 0.0}}), Error);
  }
}

TEST_CASE("canonical curve names enumerate 4 quantities x 4 motions") {
  const auto names = canonical_curve_names();
  CHECK(names.size() == 16);
  CHECK(names.front() == "strain_capsular_flexion");
  CHECK(names.back() == "force_facet_axial_rotation");
}

namespace {

DesignSpace square() {
  DesignSpace s;
  s.preset = "custom";
  for (const char* n : {"a", "b"}) {
    VariableSpec v;
    v.name = n;
    v.lower = 0.0;
    v.upper = 1.0;
    s.variables.push_back(v);
  }
  return s;
}

} // namespace

TEST_CASE("weight calibration from a sampling study") {
  const auto space = square();

  SUBCASE("constant-ratio responses give the exact ratio") {
    auto eval = [](const DesignPoint&) {
      return std::map<std::string, double>{{"d_subsidence", 0.4}, {"d_expulsion", 0.1}};
    };
    const auto cal = calibrate_weights_doe(eval, space, 50, 1);
    CHECK(cal.w1 == 1.0);
    CHECK(cal.w2 == doctest::Approx(4.0));
  }

  SUBCASE("equal magnitudes give unit weight") {
    auto eval = [](const DesignPoint& p) {
      const double v = 0.2 + p.values[0];
      return std::map<std::string, double>{{"d_subsidence", v}, {"d_expulsion", -v}};
    };
    const auto cal = calibrate_weights_doe(eval, space, 64, 2);
    CHECK(cal.w2 == doctest::Approx(1.0));
  }

  SUBCASE("independent recomputation over the same study designs") {
    auto eval = [](const DesignPoint& p) {
      return std::map<std::string, double>{{"d_subsidence", p.values[0]},
                                           {"d_expulsion", 0.5 * p.values[1]}};
    };
    const std::uint64_t seed = 33;
    const int n = 100;
    const auto cal = calibrate_weights_doe(eval, space, n, seed);

    // Recompute the means with an independent pass over the identical plan.
    const auto plan = maximin_fill(Region::full(space), space, n, {},
                                   [&](const DesignPoint& p) {
                                     return check_sampling_constraints(p, space);
                                   },
                                   seed);
    double ms = 0.0, me = 0.0;
    for (const auto& p : plan.points) {
      ms += std::abs(p.values[0]);
      me += std::abs(0.5 * p.values[1]);
    }
    CHECK(cal.w2 == doctest::Approx((ms / n) / (me / n)).epsilon(1e-12));

    // The calibrated weights equalize the mean weighted contributions.
    CHECK(std::abs(cal.w1 * cal.mean_abs_subsidence - cal.w2 * cal.mean_abs_expulsion) <= 1e-9);
  }

  SUBCASE("zero expulsion everywhere is degenerate") {
    auto eval = [](const DesignPoint&) {
      return std::map<std::string, double>{{"d_subsidence", 0.5}, {"d_expulsion", 0.0}};
    };
    CHECK_THROWS_AS(calibrate_weights_doe(eval, space, 64, 3), Error);
  }
}
