#pragma once

#include "srsm/problem.hpp"
#include "srsm/space.hpp"
#include "srsm/spine_model.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace srsm {

/// Everything one evaluation produced. Failures are data, not exceptions:
/// a failed ResponseSet marks the design infeasible downstream.
struct ResponseSet {
  std::map<std::string, double> scalars;
  std::map<std::string, Curve> curves;
  double settling_end = 0.0;  // seconds; samples before this are settling
  bool ok = true;
  std::string reason;

  static ResponseSet failure(std::string why) {
    ResponseSet r;
    r.ok = false;
    r.reason = std::move(why);
    return r;
  }
};

/// Evaluation contract: deterministic, never throws for design failures.
class Evaluator {
public:
  virtual ~Evaluator() = default;
  virtual ResponseSet evaluate(const DesignPoint& point) const = 0;
  virtual const DesignSpace& space() const = 0;
};

/// Adds mse_<curve> scalars comparing the candidate's post-settling curves
/// against each target. Missing candidate curves mark the set failed.
void add_curve_mse_scalars(ResponseSet& rs, const std::map<std::string, Curve>& targets);

/// Returns failure("out_of_bounds") reason when sampled values leave the
/// initial bounds of `space`; empty string otherwise.
std::string out_of_bounds_reason(const DesignPoint& point, const DesignSpace& space);

// ---------------------------------------------------------------------------

/// Analytic benchmark functions (sphere / quadratic / branin) exposing the
/// scalar response "objective".
class BenchmarkEvaluator : public Evaluator {
public:
  BenchmarkEvaluator(DesignSpace space, std::string function);
  ResponseSet evaluate(const DesignPoint& point) const override;
  const DesignSpace& space() const override { return space_; }

  /// Analytic minimizer in physical coordinates (where known).
  std::vector<double> analytic_minimum() const;

private:
  DesignSpace space_;
  std::string function_;
};

/// Wraps an arbitrary callable as an evaluator (tests, synthetic studies).
class FunctionEvaluator : public Evaluator {
public:
  FunctionEvaluator(DesignSpace space, std::function<ResponseSet(const DesignPoint&)> fn)
      : space_(std::move(space)), fn_(std::move(fn)) {}
  ResponseSet evaluate(const DesignPoint& point) const override { return fn_(point); }
  const DesignSpace& space() const override { return space_; }

private:
  DesignSpace space_;
  std::function<ResponseSet(const DesignPoint&)> fn_;
};

// ---------------------------------------------------------------------------

enum class BoneSide { Inferior, Superior, Combined };

BoneSide bone_side_from_name(const std::string& name);

/// Lumped closed-form stand-in for the bone-implant interface load cases.
/// All constants are configuration; the defaults are documented desk-scale
/// choices, not measured values.
struct BoneConstants {
  double f_subsidence_n = 150.0;
  double f_expulsion_n = 40.0;
  double f_service_n = 10.0;
  double k_cortical = 12.0;    // N/mm per mm^2 of bearing area
  double k_trabecular = 3.0;   // N/mm per mm^2 of spike tip area
  double hole_beta = 0.5;      // bearing-area knockdown per unit hole fraction
  double k_lock = 25.0;        // N/mm per mm^2 of spike frontal area
  double k_friction = 1.0;     // 1/mm
  double mu_eff = 0.3;
};

class BoneSurrogate : public Evaluator {
public:
  BoneSurrogate(DesignSpace space, BoneSide side, BoneConstants constants = BoneConstants{});
  ResponseSet evaluate(const DesignPoint& point) const override;
  const DesignSpace& space() const override { return space_; }

private:
  DesignSpace space_;
  BoneSide side_;
  BoneConstants c_;
};

// ---------------------------------------------------------------------------

/// Quasi-static spinal-segment surrogate driving the Eq.-2 optimization.
/// In TDR mode the joint kinematics come from the design point; the synthetic
/// intact-replicating joint (tdr_mode = false with intact parameters) flows
/// through the same path and reproduces the targets exactly.
class SpineSegmentEvaluator : public Evaluator {
public:
  SpineSegmentEvaluator(DesignSpace space, SpineConstants constants,
                        std::map<std::string, Curve> targets);

  ResponseSet evaluate(const DesignPoint& point) const override;
  const DesignSpace& space() const override { return space_; }

  /// Full four-motion evaluation of explicit segment parameters (used for
  /// target generation and the synthetic-joint checks).
  ResponseSet evaluate_segment(const SegmentParams& params) const;

  const SpineConstants& constants() const { return constants_; }
  const std::map<std::string, Curve>& targets() const { return targets_; }

private:
  DesignSpace space_;
  SpineConstants constants_;
  std::map<std::string, Curve> targets_;
};

// ---------------------------------------------------------------------------

/// Bridges to an external solver process. Writes design.txt, runs the
/// command template ({design} and {workdir} placeholders) inside a per-design
/// work directory and parses responses.csv plus optional curve_<name>.csv
/// files. Every failure (exit code, timeout, parse) is reported as data.
class ExternalProcessEvaluator : public Evaluator {
public:
  ExternalProcessEvaluator(DesignSpace space, std::string command_template, std::string workdir,
                           double timeout_s = 14400.0);
  ResponseSet evaluate(const DesignPoint& point) const override;
  const DesignSpace& space() const override { return space_; }

private:
  DesignSpace space_;
  std::string command_;
  std::string workdir_;
  double timeout_s_;
};

} // namespace srsm
