#pragma once

#include <map>
#include <string>
#include <vector>

namespace srsm {

enum class VarKind { Continuous, Discrete };

/// One design variable. Dependent variables carry a rule name instead of
/// bounds: they are computed from the sampled variables, never sampled.
struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> levels;  // discrete only, sorted ascending
  std::string dependent_rule;  // empty for sampled variables

  bool is_dependent() const { return !dependent_rule.empty(); }
  void validate() const;
};

struct DesignSpace {
  std::vector<VariableSpec> variables;  // table order, sampled and dependent mixed
  std::map<std::string, double> preset_constants;
  std::string preset = "custom";

  void validate() const;

  /// Number of sampled (non-dependent) variables.
  int dim() const;
  /// Indices into `variables` of the sampled variables, in declaration order.
  std::vector<int> sampled_indices() const;
  const VariableSpec& sampled(int i) const;
  int index_of(const std::string& name) const;  // -1 if absent
  double constant(const std::string& name) const;
  double constant_or(const std::string& name, double fallback) const;
};

/// Axis-aligned box over the sampled variables; always contained in the
/// initial bounds of the space it was built from.
struct Region {
  std::vector<double> center;
  std::vector<double> half_range;

  int dim() const { return static_cast<int>(center.size()); }
  double lo(int i) const { return center[i] - half_range[i]; }
  double hi(int i) const { return center[i] + half_range[i]; }
  bool contains(const std::vector<double>& values, double tol = 1e-9) const;
  double volume_fraction(const Region& initial) const;

  static Region full(const DesignSpace& space);
};

struct DesignPoint {
  std::vector<double> values;              // sampled variables, space order
  std::map<std::string, double> resolved;  // all variables incl. dependents
  long id = -1;
  int iteration = -1;

  double get(const std::string& name) const;
  bool has(const std::string& name) const { return resolved.count(name) > 0; }
};

struct ConstraintViolation {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<ConstraintViolation> violations;

  /// Scaled magnitude of all violations (0 when feasible); used as a
  /// continuous penalty measure by the optimizer.
  double total_scaled_violation() const;
};

/// Computes dependent variables from the sampled values.
/// Throws Error on degenerate geometry (zero cap height) or unresolvable rules.
DesignPoint resolve_dependents(const std::vector<double>& raw_values, const DesignSpace& space);

/// Preset-specific manufacturability/geometry checks evaluated before any
/// simulation. Unknown presets throw; "custom" accepts everything.
FeasibilityReport check_sampling_constraints(const DesignPoint& point, const DesignSpace& space);

/// Affine map of sampled values onto the unit cube of `region` (and back).
/// Denormalize snaps discrete variables to the nearest admissible level.
std::vector<double> normalize(const std::vector<double>& values, const Region& region);
std::vector<double> denormalize(const std::vector<double>& unit, const Region& region,
                                const DesignSpace& space);

/// The four TDR design-space presets plus the combined 34-variable
/// bone-interface space used when re-evaluating a merged design.
DesignSpace make_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Reference starting design for a preset (sampled variables only).
std::vector<double> preset_baseline(const DesignSpace& space);

} // namespace srsm
