#include "srsm/space.hpp"

#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace srsm {

void VariableSpec::validate() const {
  if (name.empty()) throw Error("variable with empty name");
  if (is_dependent()) {
    if (kind == VarKind::Discrete) throw Error(name + ": dependent variables cannot be discrete");
    return;  // dependent variables carry no bounds
  }
  if (kind == VarKind::Continuous) {
    if (!(lower < upper)) throw Error(name + ": lower must be < upper");
  } else {
    if (levels.empty()) throw Error(name + ": discrete variable needs levels");
    if (!std::is_sorted(levels.begin(), levels.end()))
      throw Error(name + ": levels must be sorted");
    if (std::adjacent_find(levels.begin(), levels.end()) != levels.end())
      throw Error(name + ": duplicate levels");
  }
}

void DesignSpace::validate() const {
  std::set<std::string> seen;
  int sampled = 0;
  for (const auto& v : variables) {
    v.validate();
    if (!seen.insert(v.name).second) throw Error("duplicate variable name: " + v.name);
    if (!v.is_dependent()) ++sampled;
  }
  if (sampled == 0) throw Error("design space needs at least one sampled variable");
}

int DesignSpace::dim() const {
  int n = 0;
  for (const auto& v : variables)
    if (!v.is_dependent()) ++n;
  return n;
}

std::vector<int> DesignSpace::sampled_indices() const {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(variables.size()); ++i)
    if (!variables[i].is_dependent()) idx.push_back(i);
  return idx;
}

const VariableSpec& DesignSpace::sampled(int i) const {
  int n = 0;
  for (const auto& v : variables) {
    if (v.is_dependent()) continue;
    if (n == i) return v;
    ++n;
  }
  throw Error("sampled variable index out of range");
}

int DesignSpace::index_of(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(variables.size()); ++i)
    if (variables[i].name == name) return i;
  return -1;
}

double DesignSpace::constant(const std::string& name) const {
  auto it = preset_constants.find(name);
  if (it == preset_constants.end()) throw Error("unknown space constant: " + name);
  return it->second;
}

double DesignSpace::constant_or(const std::string& name, double fallback) const {
  auto it = preset_constants.find(name);
  return it == preset_constants.end() ? fallback : it->second;
}

bool Region::contains(const std::vector<double>& values, double tol) const {
  if (values.size() != center.size()) return false;
  for (int i = 0; i < dim(); ++i)
    if (values[i] < lo(i) - tol || values[i] > hi(i) + tol) return false;
  return true;
}

double Region::volume_fraction(const Region& initial) const {
  double f = 1.0;
  for (int i = 0; i < dim(); ++i) f *= half_range[i] / initial.half_range[i];
  return f;
}

Region Region::full(const DesignSpace& space) {
  Region r;
  for (const auto& v : space.variables) {
    if (v.is_dependent()) continue;
    const double lo = v.kind == VarKind::Discrete ? v.levels.front() : v.lower;
    const double hi = v.kind == VarKind::Discrete ? v.levels.back() : v.upper;
    r.center.push_back(0.5 * (lo + hi));
    r.half_range.push_back(0.5 * (hi - lo));
  }
  return r;
}

double DesignPoint::get(const std::string& name) const {
  auto it = resolved.find(name);
  if (it == resolved.end()) throw Error("design point has no variable: " + name);
  return it->second;
}

double FeasibilityReport::total_scaled_violation() const {
  double total = 0.0;
  for (const auto& v : violations) {
    const double scale = std::max(std::abs(v.bound), 1.0);
    total += std::abs(v.measured - v.bound) / scale;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Dependent-variable rules

namespace {

struct RuleContext {
  const DesignSpace& space;
  std::map<std::string, double>& resolved;

  bool ready(const std::string& name) const { return resolved.count(name) > 0; }
  double val(const std::string& name) const { return resolved.at(name); }
};

double cap_radius_from_chord(double chord_radius, double cap_height) {
  if (cap_height == 0.0) throw Error("degenerate geometry: cap height is zero");
  return (chord_radius * chord_radius + cap_height * cap_height) / (2.0 * cap_height);
}

// Returns true once the rule's inputs were available and the value was stored.
bool apply_rule(const std::string& var, const std::string& rule, RuleContext& ctx) {
  const double clearance = ctx.space.constant_or("radial_clearance", 0.07);
  if (rule == "sphere_plus_clearance") {
    if (!ctx.ready("sphere_radius")) return false;
    ctx.resolved[var] = ctx.val("sphere_radius") + clearance;
    return true;
  }
  if (rule == "cap_protrusion_minus_gap") {
    if (!ctx.ready("sphere_radius") || !ctx.ready("sphere_origin_zshift")) return false;
    const double gap = ctx.space.constant_or("articulation_gap", 1.99);
    ctx.resolved[var] = ctx.val("sphere_radius") - ctx.val("sphere_origin_zshift") - gap;
    return true;
  }
  if (rule == "cap_radius_from_chord_sup" || rule == "cap_radius_from_chord_inf") {
    const std::string h =
        rule.ends_with("sup") ? "middle_top_sphere_h" : "middle_bottom_sphere_h";
    if (!ctx.ready("middle_cylinder_r") || !ctx.ready(h)) return false;
    ctx.resolved[var] = cap_radius_from_chord(ctx.val("middle_cylinder_r"), ctx.val(h));
    return true;
  }
  if (rule == "cap_radius_sup_plus_clearance") {
    if (!ctx.ready("middle_top_sphere_R")) return false;
    ctx.resolved[var] = ctx.val("middle_top_sphere_R") + clearance;
    return true;
  }
  if (rule == "cap_radius_inf_plus_clearance") {
    if (!ctx.ready("middle_bottom_sphere_R")) return false;
    ctx.resolved[var] = ctx.val("middle_bottom_sphere_R") + clearance;
    return true;
  }
  if (rule == "insert_height_balance") {
    if (!ctx.ready("trough_depth_sup") || !ctx.ready("trough_depth_inf") ||
        !ctx.ready("middle_top_sphere_h") || !ctx.ready("middle_bottom_sphere_h"))
      return false;
    const double h0 = ctx.space.constant_or("insert_height_ref", 1.97);
    ctx.resolved[var] = h0 + ctx.val("trough_depth_sup") + ctx.val("trough_depth_inf") -
                        ctx.val("middle_top_sphere_h") - ctx.val("middle_bottom_sphere_h");
    return true;
  }
  throw Error("unknown dependent rule: " + rule);
}

} // namespace

DesignPoint resolve_dependents(const std::vector<double>& raw_values, const DesignSpace& space) {
  const auto sampled = space.sampled_indices();
  if (raw_values.size() != sampled.size())
    throw Error("raw value count " + std::to_string(raw_values.size()) +
                " does not match sampled variable count " + std::to_string(sampled.size()));

  DesignPoint p;
  p.values = raw_values;
  RuleContext ctx{space, p.resolved};
  for (std::size_t i = 0; i < sampled.size(); ++i)
    p.resolved[space.variables[sampled[i]].name] = raw_values[i];

  // Rules may reference other dependents; iterate until a fixed point.
  for (;;) {
    bool progress = false;
    bool pending = false;
    for (const auto& v : space.variables) {
      if (!v.is_dependent() || ctx.ready(v.name)) continue;
      if (apply_rule(v.name, v.dependent_rule, ctx))
        progress = true;
      else
        pending = true;
    }
    if (!pending) break;
    if (!progress) throw Error("unresolvable dependent-variable cycle in space " + space.preset);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Sampling constraints

namespace {

void require(FeasibilityReport& report, bool ok, const std::string& name, double measured,
             double bound) {
  if (ok) return;
  report.feasible = false;
  report.violations.push_back({name, measured, bound});
}

struct SpikeGroup {
  double number_x, number_y, height, bottom_x_len, bottom_y_len, gap_x, gap_y;
  double tip_x, tip_y, tip_area_per_spike, n_spikes, tip_area_total;
  double extent_x, extent_y;
};

SpikeGroup spike_group(const DesignPoint& p, const std::string& prefix) {
  SpikeGroup g{};
  g.number_x = p.get(prefix + "number_x");
  g.number_y = p.get(prefix + "number_y");
  g.height = p.get(prefix + "height");
  g.bottom_x_len = p.get(prefix + "bottom_x_len");
  g.bottom_y_len = p.get(prefix + "bottom_y_len");
  g.gap_x = p.get(prefix + "gap_x");
  g.gap_y = p.get(prefix + "gap_y");
  g.tip_x = g.bottom_x_len - p.get(prefix + "top_x_shift_ant") - p.get(prefix + "top_x_shift_pos");
  g.tip_y = g.bottom_y_len - 2.0 * p.get(prefix + "top_y_shift_lat");
  g.tip_area_per_spike = std::max(0.0, g.tip_x) * std::max(0.0, g.tip_y);
  g.n_spikes = g.number_x * g.number_y;
  g.tip_area_total = g.tip_area_per_spike * g.n_spikes;
  g.extent_x = g.number_x * g.bottom_x_len + (g.number_x - 1.0) * g.gap_x;
  g.extent_y = g.number_y * g.bottom_y_len + (g.number_y - 1.0) * g.gap_y;
  return g;
}

void check_bone_side(const DesignPoint& p, const DesignSpace& space, const std::string& endplate,
                     const std::string& fix, FeasibilityReport& report) {
  const double max_tip_area = space.constant_or("max_tip_area", 2.5);
  const double min_tip_edge = space.constant_or("min_tip_edge", 0.25);
  const double margin = space.constant_or("footprint_margin", 1.0);
  const bool inferior = endplate == "bottom_";
  const double foot_x =
      space.constant_or(inferior ? "endplate_inferior_x" : "endplate_superior_x", inferior ? 15.0 : 12.0);
  const double foot_y =
      space.constant_or(inferior ? "endplate_inferior_y" : "endplate_superior_y", 17.0);

  const auto g = spike_group(p, fix);
  require(report, g.tip_area_total <= max_tip_area, fix + "tip_area", g.tip_area_total,
          max_tip_area);
  require(report, g.height >= 0.5, fix + "height_min", g.height, 0.5);
  require(report, g.height <= 2.0, fix + "height_max", g.height, 2.0);
  require(report, g.tip_x >= min_tip_edge, fix + "tip_edge_x", g.tip_x, min_tip_edge);
  require(report, g.tip_y >= min_tip_edge, fix + "tip_edge_y", g.tip_y, min_tip_edge);
  require(report, g.extent_x <= foot_x - 2.0 * margin, fix + "extent_x", g.extent_x,
          foot_x - 2.0 * margin);
  require(report, g.extent_y <= foot_y - 2.0 * margin, fix + "extent_y", g.extent_y,
          foot_y - 2.0 * margin);

  for (const char* side : {"anterior", "lateral", "posterior"}) {
    const double major = p.get(endplate + "major_radius_" + side);
    const double minor = p.get(endplate + "minor_radius_" + side);
    require(report, major > minor, endplate + "major_gt_minor_" + side, major, minor);
  }
}

void check_insert_aspect(const DesignPoint& p, FeasibilityReport& report) {
  const double width = 2.0 * p.get("middle_cylinder_r");
  const double height =
      p.get("middle_cylinder_h") + p.get("middle_top_sphere_h") + p.get("middle_bottom_sphere_h");
  require(report, width > height, "insert_width_gt_height", width, height);
}

} // namespace

FeasibilityReport check_sampling_constraints(const DesignPoint& point, const DesignSpace& space) {
  FeasibilityReport report;
  const std::string& preset = space.preset;
  if (preset == "bone_inferior") {
    check_bone_side(point, space, "bottom_", "fix_2_", report);
  } else if (preset == "bone_superior") {
    check_bone_side(point, space, "top_", "fix_1_", report);
  } else if (preset == "bone_combined") {
    check_bone_side(point, space, "bottom_", "fix_2_", report);
    check_bone_side(point, space, "top_", "fix_1_", report);
    const double distraction = point.get("fix_1_height") + point.get("fix_2_height");
    const double max_distraction = space.constant_or("max_distraction", 4.0);
    require(report, distraction <= max_distraction, "distraction_sum", distraction,
            max_distraction);
  } else if (preset == "single_articulation") {
    // All manufacturing limits of this space are encoded as variable bounds.
  } else if (preset == "dual_articulation") {
    check_insert_aspect(point, report);
  } else if (preset == "custom") {
    // Custom spaces carry no built-in sampling constraints.
  } else {
    throw Error("unknown preset: " + preset);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Normalization

std::vector<double> normalize(const std::vector<double>& values, const Region& region) {
  if (values.size() != region.center.size()) throw Error("normalize: dimension mismatch");
  std::vector<double> u(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    u[i] = (values[i] - region.lo(static_cast<int>(i))) /
           (2.0 * region.half_range[i]);
  return u;
}

std::vector<double> denormalize(const std::vector<double>& unit, const Region& region,
                                const DesignSpace& space) {
  if (unit.size() != region.center.size()) throw Error("denormalize: dimension mismatch");
  std::vector<double> x(unit.size());
  for (int i = 0; i < static_cast<int>(unit.size()); ++i) {
    const double raw = region.lo(i) + unit[i] * 2.0 * region.half_range[i];
    const auto& var = space.sampled(i);
    if (var.kind == VarKind::Discrete) {
      // Nearest level, preferring levels inside the current region.
      double best = var.levels.front();
      double best_dist = std::numeric_limits<double>::infinity();
      bool best_inside = false;
      for (double level : var.levels) {
        const bool inside = level >= region.lo(i) - 1e-12 && level <= region.hi(i) + 1e-12;
        const double dist = std::abs(level - raw);
        if ((inside && !best_inside) || (inside == best_inside && dist < best_dist)) {
          best = level;
          best_dist = dist;
          best_inside = inside;
        }
      }
      x[i] = best;
    } else {
      x[i] = raw;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

VariableSpec cont(std::string name, double lo, double hi) {
  VariableSpec v;
  v.name = std::move(name);
  v.lower = lo;
  v.upper = hi;
  return v;
}

VariableSpec disc(std::string name, std::vector<double> levels) {
  VariableSpec v;
  v.name = std::move(name);
  v.kind = VarKind::Discrete;
  v.levels = std::move(levels);
  v.lower = v.levels.front();
  v.upper = v.levels.back();
  return v;
}

VariableSpec dep(std::string name, std::string rule) {
  VariableSpec v;
  v.name = std::move(name);
  v.dependent_rule = std::move(rule);
  return v;
}

void add_endplate_vars(DesignSpace& s, const std::string& prefix, double base_max,
                       double major_max, double minor_max) {
  s.variables.push_back(cont(prefix + "base_radius", 0.25, base_max));
  for (const char* side : {"anterior", "lateral", "posterior"})
    s.variables.push_back(cont(prefix + "major_radius_" + std::string(side), 0.25, major_max));
  for (const char* side : {"anterior", "lateral", "posterior"})
    s.variables.push_back(cont(prefix + "minor_radius_" + std::string(side), 0.25, minor_max));
}

void add_fixation_vars(DesignSpace& s, const std::string& prefix, double gap_x_max) {
  s.variables.push_back(disc(prefix + "number_x", {2, 3}));
  s.variables.push_back(disc(prefix + "number_y", {2, 3}));
  s.variables.push_back(cont(prefix + "height", 0.5, 2.0));
  s.variables.push_back(cont(prefix + "bottom_x_len", 1.0, 3.0));
  s.variables.push_back(cont(prefix + "bottom_y_len", 1.0, 3.0));
  s.variables.push_back(cont(prefix + "gap_x", 0.0, gap_x_max));
  s.variables.push_back(cont(prefix + "gap_y", 0.0, 5.0));
  s.variables.push_back(cont(prefix + "top_x_shift_ant", 0.0, 2.5));
  s.variables.push_back(cont(prefix + "top_y_shift_lat", 0.0, 1.5));
  s.variables.push_back(cont(prefix + "top_x_shift_pos", 0.0, 2.5));
}

void add_bone_constants(DesignSpace& s) {
  s.preset_constants["endplate_inferior_x"] = 15.0;
  s.preset_constants["endplate_inferior_y"] = 17.0;
  s.preset_constants["endplate_superior_x"] = 12.0;
  s.preset_constants["endplate_superior_y"] = 17.0;
  s.preset_constants["core_height"] = 6.0;
  s.preset_constants["footprint_margin"] = 1.0;
  s.preset_constants["max_tip_area"] = 2.5;
  s.preset_constants["min_tip_edge"] = 0.25;
  s.preset_constants["max_distraction"] = 4.0;
}

void add_articulation_constants(DesignSpace& s) {
  s.preset_constants["radial_clearance"] = 0.07;
  s.preset_constants["articulation_gap"] = 1.99;
  s.preset_constants["insert_height_ref"] = 1.97;
}

DesignSpace bone_inferior_space() {
  DesignSpace s;
  s.preset = "bone_inferior";
  add_endplate_vars(s, "bottom_", 5.0, 7.0, 2.0);
  add_fixation_vars(s, "fix_2_", 5.0);
  add_bone_constants(s);
  return s;
}

DesignSpace bone_superior_space() {
  DesignSpace s;
  s.preset = "bone_superior";
  add_endplate_vars(s, "top_", 3.0, 5.0, 1.0);
  add_fixation_vars(s, "fix_1_", 3.0);
  add_bone_constants(s);
  return s;
}

DesignSpace bone_combined_space() {
  DesignSpace s;
  s.preset = "bone_combined";
  add_endplate_vars(s, "bottom_", 5.0, 7.0, 2.0);
  add_endplate_vars(s, "top_", 3.0, 5.0, 1.0);
  add_fixation_vars(s, "fix_1_", 3.0);
  add_fixation_vars(s, "fix_2_", 5.0);
  add_bone_constants(s);
  return s;
}

DesignSpace single_articulation_space() {
  DesignSpace s;
  s.preset = "single_articulation";
  s.variables.push_back(cont("sphere_origin_xshift", -7.5, 7.5));
  s.variables.push_back(cont("sphere_origin_zshift", 0.0, 5.85));
  s.variables.push_back(cont("sphere_radius", 3.0, 7.35));
  s.variables.push_back(dep("cylinder_radius", "sphere_plus_clearance"));
  s.variables.push_back(cont("cylinder_height", 0.0, 5.0));
  s.variables.push_back(cont("cylinder_offset", -2.5, 2.5));
  s.variables.push_back(dep("trough_depth", "cap_protrusion_minus_gap"));
  s.variables.push_back(cont("torus1_radius1", 0.0, 7.0));
  s.variables.push_back(cont("torus2_radius1", 0.0, 7.0));
  add_articulation_constants(s);
  return s;
}

DesignSpace dual_articulation_space() {
  DesignSpace s;
  s.preset = "dual_articulation";
  s.variables.push_back(cont("midline_xshift", -3.95, 3.95));
  s.variables.push_back(dep("cylinder_radius_sup", "cap_radius_sup_plus_clearance"));
  s.variables.push_back(cont("cylinder_height_sup", 0.0, 5.0));
  s.variables.push_back(cont("cylinder_offset_sup", -2.5, 2.5));
  s.variables.push_back(cont("trough_depth_sup", 0.5, 1.0));
  s.variables.push_back(cont("torus1_radius1_sup", 0.0, 7.0));
  s.variables.push_back(cont("torus2_radius1_sup", 0.0, 7.0));
  s.variables.push_back(dep("cylinder_radius_inf", "cap_radius_inf_plus_clearance"));
  s.variables.push_back(cont("cylinder_height_inf", 0.0, 5.0));
  s.variables.push_back(cont("cylinder_offset_inf", -2.5, 2.5));
  s.variables.push_back(cont("trough_depth_inf", 0.5, 2.0));
  s.variables.push_back(cont("torus1_radius1_inf", 0.0, 7.0));
  s.variables.push_back(cont("torus2_radius1_inf", 0.0, 7.0));
  s.variables.push_back(dep("middle_cylinder_h", "insert_height_balance"));
  s.variables.push_back(cont("middle_cylinder_r", 1.0, 4.95));
  s.variables.push_back(dep("middle_top_sphere_R", "cap_radius_from_chord_sup"));
  s.variables.push_back(cont("middle_top_sphere_h", 0.5, 2.5));
  s.variables.push_back(dep("middle_bottom_sphere_R", "cap_radius_from_chord_inf"));
  s.variables.push_back(cont("middle_bottom_sphere_h", 0.5, 2.5));
  add_articulation_constants(s);
  return s;
}

const std::map<std::string, std::map<std::string, double>>& baselines() {
  static const std::map<std::string, std::map<std::string, double>> table = {
      {"bone_inferior",
       {{"bottom_base_radius", 3.0},
        {"bottom_major_radius_anterior", 7.0},
        {"bottom_major_radius_lateral", 7.0},
        {"bottom_major_radius_posterior", 7.0},
        {"bottom_minor_radius_anterior", 1.5},
        {"bottom_minor_radius_lateral", 1.5},
        {"bottom_minor_radius_posterior", 1.5},
        {"fix_2_number_x", 2},
        {"fix_2_number_y", 2},
        {"fix_2_height", 1.25},
        {"fix_2_bottom_x_len", 3.0},
        {"fix_2_bottom_y_len", 3.0},
        {"fix_2_gap_x", 2.0},
        {"fix_2_gap_y", 2.0},
        {"fix_2_top_x_shift_ant", 0.5},
        {"fix_2_top_y_shift_lat", 1.35},
        {"fix_2_top_x_shift_pos", 2.0}}},
      {"bone_superior",
       {{"top_base_radius", 3.0},
        {"top_major_radius_anterior", 5.0},
        {"top_major_radius_lateral", 5.0},
        {"top_major_radius_posterior", 5.0},
        {"top_minor_radius_anterior", 1.0},
        {"top_minor_radius_lateral", 1.0},
        {"top_minor_radius_posterior", 1.0},
        {"fix_1_number_x", 2},
        {"fix_1_number_y", 2},
        {"fix_1_height", 1.25},
        {"fix_1_bottom_x_len", 3.0},
        {"fix_1_bottom_y_len", 3.0},
        {"fix_1_gap_x", 1.5},
        {"fix_1_gap_y", 2.0},
        {"fix_1_top_x_shift_ant", 0.5},
        {"fix_1_top_y_shift_lat", 1.35},
        {"fix_1_top_x_shift_pos", 2.0}}},
      {"single_articulation",
       {{"sphere_origin_xshift", 0.0},
        {"sphere_origin_zshift", 1.16},
        {"sphere_radius", 4.60},
        {"cylinder_height", 1.84},
        {"cylinder_offset", -0.24},
        {"torus1_radius1", 2.31},
        {"torus2_radius1", 1.82}}},
      {"dual_articulation",
       {{"midline_xshift", 0.0},
        {"cylinder_height_sup", 1.0},
        {"cylinder_offset_sup", 0.0},
        {"trough_depth_sup", 0.75},
        {"torus1_radius1_sup", 0.5},
        {"torus2_radius1_sup", 0.5},
        {"cylinder_height_inf", 1.84},
        {"cylinder_offset_inf", -0.24},
        {"trough_depth_inf", 1.46},
        {"torus1_radius1_inf", 2.31},
        {"torus2_radius1_inf", 1.82},
        {"middle_cylinder_r", 3.0},
        {"middle_top_sphere_h", 1.1},
        {"middle_bottom_sphere_h", 1.1}}},
  };
  return table;
}

} // namespace

DesignSpace make_preset(const std::string& name) {
  DesignSpace s;
  if (name == "bone_inferior")
    s = bone_inferior_space();
  else if (name == "bone_superior")
    s = bone_superior_space();
  else if (name == "bone_combined")
    s = bone_combined_space();
  else if (name == "single_articulation")
    s = single_articulation_space();
  else if (name == "dual_articulation")
    s = dual_articulation_space();
  else
    throw Error("unknown preset: " + name);
  s.validate();
  return s;
}

std::vector<std::string> preset_names() {
  return {"bone_inferior", "bone_superior", "single_articulation", "dual_articulation"};
}

std::vector<double> preset_baseline(const DesignSpace& space) {
  std::vector<double> values;
  if (space.preset == "bone_combined") {
    const auto& inf = baselines().at("bone_inferior");
    const auto& sup = baselines().at("bone_superior");
    for (const auto& v : space.variables) {
      if (v.is_dependent()) continue;
      if (auto it = inf.find(v.name); it != inf.end())
        values.push_back(it->second);
      else if (auto jt = sup.find(v.name); jt != sup.end())
        values.push_back(jt->second);
      else
        throw Error("no baseline value for " + v.name);
    }
    return values;
  }
  auto preset_it = baselines().find(space.preset);
  if (preset_it == baselines().end()) throw Error("no baseline for preset: " + space.preset);
  for (const auto& v : space.variables) {
    if (v.is_dependent()) continue;
    auto it = preset_it->second.find(v.name);
    if (it == preset_it->second.end()) throw Error("no baseline value for " + v.name);
    values.push_back(it->second);
  }
  return values;
}

} // namespace srsm
