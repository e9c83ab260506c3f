#include "srsm/space.hpp"

#include "srsm/rng.hpp"
#include "srsm/util.hpp"
#include "table_data.hpp"

#include <doctest.h>

#include <cmath>

using namespace srsm;

namespace {

std::vector<double> sampled_column(const DesignSpace& space, const std::vector<testdata::Row>& rows,
                                   bool optimized) {
  std::vector<double> values;
  for (const auto& v : space.variables) {
    if (v.is_dependent()) continue;
    for (const auto& row : rows)
      if (row.name == v.name) values.push_back(optimized ? row.optimized : row.baseline);
  }
  REQUIRE(values.size() == static_cast<std::size_t>(space.dim()));
  return values;
}

} // namespace

TEST_CASE("presets expose the published spaces") {
  CHECK(make_preset("bone_inferior").dim() == 17);
  CHECK(make_preset("bone_superior").dim() == 17);
  CHECK(make_preset("single_articulation").dim() == 7);
  CHECK(make_preset("dual_articulation").dim() == 14);
  CHECK(make_preset("bone_combined").dim() == 34);
  CHECK_THROWS_AS(make_preset("nope"), Error);

  const auto single = make_preset("single_articulation");
  const auto& xshift = single.variables[single.index_of("sphere_origin_xshift")];
  CHECK(xshift.lower == -7.5);
  CHECK(xshift.upper == 7.5);

  const auto inferior = make_preset("bone_inferior");
  const auto& nx = inferior.variables[inferior.index_of("fix_2_number_x")];
  CHECK(nx.kind == VarKind::Discrete);
  CHECK(nx.levels == std::vector<double>{2, 3});

  const auto dual = make_preset("dual_articulation");
  const auto& mid = dual.variables[dual.index_of("midline_xshift")];
  CHECK(mid.lower == -3.95);
  CHECK(mid.upper == 3.95);
}

TEST_CASE("preset bounds and variable kinds match the reference tables") {
  for (const auto& [preset, rows] : testdata::all_preset_rows()) {
    const auto space = make_preset(preset);
    CHECK(space.variables.size() == rows->size());
    for (const auto& row : *rows) {
      const int idx = space.index_of(row.name);
      REQUIRE_MESSAGE(idx >= 0, preset << "." << row.name);
      const auto& var = space.variables[idx];
      CHECK(var.is_dependent() == row.dependent);
      if (row.dependent) continue;
      CHECK((var.kind == VarKind::Discrete) == row.discrete);
      CHECK(var.lower == doctest::Approx(row.lo));
      CHECK(var.upper == doctest::Approx(row.hi));
    }
  }
}

TEST_CASE("baseline and optimized designs lie inside the stated bounds") {
  for (const auto& [preset, rows] : testdata::all_preset_rows()) {
    for (const auto& row : *rows) {
      if (row.dependent) continue;
      CHECK_MESSAGE(row.baseline >= row.lo - 1e-12, preset << "." << row.name << " baseline");
      CHECK_MESSAGE(row.baseline <= row.hi + 1e-12, preset << "." << row.name << " baseline");
      CHECK_MESSAGE(row.optimized >= row.lo - 1e-12, preset << "." << row.name << " optimized");
      CHECK_MESSAGE(row.optimized <= row.hi + 1e-12, preset << "." << row.name << " optimized");
    }
  }
}

TEST_CASE("built-in baselines equal the reference baseline column") {
  for (const auto& [preset, rows] : testdata::all_preset_rows()) {
    const auto space = make_preset(preset);
    const auto baseline = preset_baseline(space);
    const auto expected = sampled_column(space, *rows, false);
    for (std::size_t i = 0; i < baseline.size(); ++i)
      CHECK(baseline[i] == doctest::Approx(expected[i]));
  }
}

TEST_CASE("dependent rules reproduce the listed values") {
  // 2% for the plain geometric rules; 5% for the two documented-choice rules.
  for (const auto& [preset, rows] : testdata::all_preset_rows()) {
    const auto space = make_preset(preset);
    for (bool optimized : {false, true}) {
      const auto point = resolve_dependents(sampled_column(space, *rows, optimized), space);
      for (const auto& row : *rows) {
        if (!row.dependent) continue;
        const double listed = optimized ? row.optimized : row.baseline;
        const double computed = point.get(row.name);
        const double tol = row.open_question ? 0.05 : 0.02;
        CHECK_MESSAGE(std::abs(computed - listed) <= tol * std::abs(listed),
                      preset << "." << row.name << (optimized ? " optimized" : " baseline")
                             << ": computed " << computed << " listed " << listed);
      }
    }
  }
}

TEST_CASE("single-articulation dependents: published examples") {
  const auto space = make_preset("single_articulation");
  // sphere_radius 4.96 -> cylinder_radius 5.03 (radial clearance 0.07)
  auto p = resolve_dependents({-0.17, 2.39, 4.96, 2.16, 0.99, 1.94, 0.02}, space);
  CHECK(p.get("cylinder_radius") == doctest::Approx(5.03));
  CHECK(p.get("trough_depth") == doctest::Approx(0.58));
}

TEST_CASE("dual-articulation dependents: cap radius from chord and height") {
  const auto space = make_preset("dual_articulation");
  const auto& rows = testdata::dual_articulation_rows();
  auto p = resolve_dependents(sampled_column(space, rows, true), space);
  // R = (2.17^2 + 0.92^2) / (2 * 0.92) = 3.019...
  CHECK(p.get("middle_top_sphere_R") ==
        doctest::Approx((2.17 * 2.17 + 0.92 * 0.92) / (2.0 * 0.92)));
  CHECK(std::abs(p.get("middle_top_sphere_R") - 3.02) / 3.02 < 0.01);
  CHECK(std::abs(p.get("cylinder_radius_sup") - 3.09) / 3.09 < 0.02);
}

TEST_CASE("zero cap height is degenerate") {
  auto space = make_preset("dual_articulation");
  auto values = sampled_column(space, testdata::dual_articulation_rows(), false);
  for (int i = 0; i < space.dim(); ++i)
    if (space.sampled(i).name == "middle_top_sphere_h") values[i] = 0.0;
  CHECK_THROWS_WITH_AS(resolve_dependents(values, space), doctest::Contains("degenerate"), Error);
}

TEST_CASE("sampling constraints: published bone examples") {
  const auto space = make_preset("bone_superior");
  const auto& rows = testdata::bone_superior_rows();

  SUBCASE("optimized fixation tip area is 0.43 x 0.35 over 9 spikes") {
    const auto p = resolve_dependents(sampled_column(space, rows, true), space);
    const double tip_x = 1.89 - 1.17 - 0.29;
    const double tip_y = 1.13 - 2.0 * 0.39;
    CHECK(tip_x == doctest::Approx(0.43));
    CHECK(tip_y == doctest::Approx(0.35));
    CHECK(9.0 * tip_x * tip_y == doctest::Approx(1.3545));  // <= 2.5
    CHECK(check_sampling_constraints(p, space).feasible);
  }

  SUBCASE("baseline is feasible") {
    const auto p = resolve_dependents(sampled_column(space, rows, false), space);
    const auto report = check_sampling_constraints(p, space);
    CHECK(report.feasible);
    CHECK(report.violations.empty());
  }

  SUBCASE("minor radius equal to major radius violates the strict inequality") {
    auto values = sampled_column(space, rows, false);
    for (int i = 0; i < space.dim(); ++i)
      if (space.sampled(i).name == "top_minor_radius_anterior") values[i] = 1.0;
    for (int i = 0; i < space.dim(); ++i)
      if (space.sampled(i).name == "top_major_radius_anterior") values[i] = 1.0;
    const auto p = resolve_dependents(values, space);
    const auto report = check_sampling_constraints(p, space);
    CHECK_FALSE(report.feasible);
    bool found = false;
    for (const auto& v : report.violations)
      if (v.name.find("major_gt_minor") != std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("sampling constraints: all baselines feasible") {
  for (const auto& [preset, rows] : testdata::all_preset_rows()) {
    const auto space = make_preset(preset);
    const auto p = resolve_dependents(sampled_column(space, *rows, false), space);
    CHECK_MESSAGE(check_sampling_constraints(p, space).feasible, preset);
  }
}

TEST_CASE("dual articulation insert must be wider than tall") {
  const auto space = make_preset("dual_articulation");
  const auto& rows = testdata::dual_articulation_rows();

  // Published optimized design: width 4.34 > height 3.77.
  auto p = resolve_dependents(sampled_column(space, rows, true), space);
  CHECK(2.0 * p.get("middle_cylinder_r") == doctest::Approx(4.34));
  CHECK(check_sampling_constraints(p, space).feasible);

  // A narrow, tall insert flips the constraint.
  auto values = sampled_column(space, rows, false);
  for (int i = 0; i < space.dim(); ++i) {
    const auto& name = space.sampled(i).name;
    if (name == "middle_cylinder_r") values[i] = 1.0;
    if (name == "middle_top_sphere_h" || name == "middle_bottom_sphere_h") values[i] = 2.5;
  }
  const auto narrow = resolve_dependents(values, space);
  const auto report = check_sampling_constraints(narrow, space);
  CHECK_FALSE(report.feasible);
  CHECK(report.violations.front().name == "insert_width_gt_height");
}

TEST_CASE("unknown preset in constraint check") {
  DesignSpace space = make_preset("single_articulation");
  space.preset = "mystery";
  const auto base = make_preset("single_articulation");
  const auto p = resolve_dependents(preset_baseline(base), base);
  CHECK_THROWS_AS(check_sampling_constraints(p, space), Error);
}

TEST_CASE("normalization maps the region onto the unit cube") {
  const auto space = make_preset("single_articulation");
  const Region region = Region::full(space);

  SUBCASE("center maps to 0.5, lower corner to 0") {
    for (double u : normalize(region.center, region)) CHECK(u == doctest::Approx(0.5));
    std::vector<double> corner(space.dim());
    for (int i = 0; i < space.dim(); ++i) corner[i] = region.lo(i);
    for (double u : normalize(corner, region)) CHECK(u == doctest::Approx(0.0));
  }

  SUBCASE("round trip is the identity for 100 random points") {
    Rng rng(123);
    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> values(space.dim());
      for (int i = 0; i < space.dim(); ++i) values[i] = rng.uniform(region.lo(i), region.hi(i));
      const auto back = denormalize(normalize(values, region), region, space);
      for (int i = 0; i < space.dim(); ++i)
        max_err = std::max(max_err, std::abs(back[i] - values[i]));
    }
    CHECK(max_err <= 1e-12);
  }

  SUBCASE("discrete variables snap to the nearest level") {
    const auto bone = make_preset("bone_inferior");
    const Region full = Region::full(bone);
    std::vector<double> u(bone.dim(), 0.4);
    const auto values = denormalize(u, full, bone);
    for (int i = 0; i < bone.dim(); ++i) {
      const auto& var = bone.sampled(i);
      if (var.kind != VarKind::Discrete) continue;
      CHECK(values[i] == 2.0);  // 0.4 of [2,3] = 2.4 -> nearest level 2
    }
  }
}

TEST_CASE("region containment and volume") {
  const auto space = make_preset("single_articulation");
  const Region full = Region::full(space);
  CHECK(full.contains(full.center));
  CHECK(full.volume_fraction(full) == doctest::Approx(1.0));

  Region half = full;
  for (auto& h : half.half_range) h *= 0.5;
  CHECK(half.volume_fraction(full) == doctest::Approx(std::pow(0.5, space.dim())));
}

TEST_CASE("design space validation") {
  DesignSpace s;
  s.preset = "custom";
  VariableSpec v;
  v.name = "x";
  v.lower = 1.0;
  v.upper = 0.0;
  s.variables.push_back(v);
  CHECK_THROWS_AS(s.validate(), Error);

  s.variables[0].upper = 2.0;
  s.variables.push_back(s.variables[0]);  // duplicate name
  CHECK_THROWS_AS(s.validate(), Error);
}
