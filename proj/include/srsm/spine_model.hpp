#pragma once

#include "srsm/problem.hpp"
#include "srsm/space.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace srsm {

enum class Motion { Flexion, Extension, LateralBending, AxialRotation };

constexpr std::array<Motion, 4> kAllMotions = {Motion::Flexion, Motion::Extension,
                                               Motion::LateralBending, Motion::AxialRotation};

std::string motion_name(Motion m);
Motion motion_from_name(const std::string& name);

/// One value per principal motion.
struct MotionMap {
  double flexion = 0.0;
  double extension = 0.0;
  double lateral_bending = 0.0;
  double axial_rotation = 0.0;

  double at(Motion m) const;
  double& at(Motion m);
};

struct LigamentParams {
  double rest_length = 10.0;        // mm
  double slack_strain = 0.0;
  double stiffness = 10.0;          // N per unit strain
  double translation_coupling = 0.0;  // mm elongation per mm AP translation
  MotionMap lever;                  // mm moment arm per motion
};

struct FacetParams {
  MotionMap stiffness;   // N per degree past engagement
  MotionMap engage_deg;  // engagement angle, degrees
  MotionMap lever;       // mm moment arm
};

struct IntactJointParams {
  MotionMap rotational_stiffness;  // N*mm per rad, linearized per motion
  MotionMap kappa;                 // coupled AP translation, mm per degree
};

/// Articulation kinematics derived from a TDR design point (all lengths
/// already at implantation scale).
struct ArticulationInterface {
  double radius = 0.0;           // articulating radius, mm
  double avail_clearance = 0.0;  // clearance budget against impingement, mm
};

struct TdrKinematics {
  double effective_radius = 0.0;   // mm, drives coupled AP translation
  double center_offset = 0.0;      // mm, AP offset of the articulation center
  double travel_anterior = 0.07;   // mm, AP travel limit
  double travel_posterior = 0.07;  // mm
  double bearing_stiffness = 0.0;  // N*mm/rad
  MotionMap articulation_stiffness;  // N*mm/rad, congruence resistance per motion
  double theta_share = 1.0;        // rotation fraction seen per interface
  std::vector<ArticulationInterface> interfaces;
  double contact_radius = 0.0;     // mm, smallest articulating radius
};

struct SegmentParams {
  LigamentParams capsular, interspinal, flavum;
  FacetParams facet;
  bool tdr_mode = false;
  IntactJointParams intact;
  TdrKinematics tdr;
  double scale = 0.75;  // implant scale factor applied when deriving kinematics
};

struct LoadCase {
  std::string name;
  double preload_n = 73.6;
  double moment_nm = 1.8;     // signed: extension is negative
  double ramp_duration_s = 1.0;
  double settling_s = 0.1;
};

struct SpineConstants {
  double preload_n = 73.6;
  MotionMap moment_nm{1.8, 1.0, 1.8, 1.8};  // magnitudes; extension applied negative
  double ramp_s = 1.0;
  double settling_s = 0.1;
  double dt_s = 0.010;
  double scale = 0.75;
  double clearance = 0.07;           // radial clearance, mm
  double bearing_stiffness = 500.0;  // N*mm/rad of the articulating couple
  double travel_per_torus = 1.0;     // mm AP travel per mm torus radius at reference depth
  double travel_depth_ref = 1.0;     // mm trough depth giving full torus travel
  double impingement_factor = 1.0;
  // Congruence of the bearing against each rotation: the mediolaterally
  // conforming trough resists lateral bending (and, more weakly, axial
  // rotation) with a contact-wedge stiffness preload * R^2 / clearance.
  // Flexion/extension stay free, which is the motion-preserving intent.
  MotionMap congruence{0.0, 0.0, 1.0, 0.3};
  double hertz_c = 1.0;
  double hertz_kappa = 1.0;
  double max_angle_rad = 0.6;
  SegmentParams segment;  // calibrated intact segment

  static SpineConstants defaults();
};

LoadCase load_case_for(Motion m, const SpineConstants& c);

/// Total resisting moment (N*mm) of the segment at signed rotation theta
/// (radians); strictly increasing in theta. Exposed for residual checks.
double resisting_moment(const SegmentParams& p, Motion m, double theta_rad,
                        const SpineConstants& c);

/// Coupled anteroposterior translation at signed theta (mm).
double ap_translation(const SegmentParams& p, Motion m, double theta_rad);

struct MotionSweep {
  std::vector<double> time_s;
  std::vector<double> moment_nmm;
  std::vector<double> theta_rad;
  std::vector<double> t_ap_mm;
  std::vector<double> strain_capsular, strain_interspinal, strain_flavum;
  std::vector<double> force_facet_n;
  double impingement = 0.0;  // max over the sweep; <= 0 means clearance left
};

/// Quasi-static sweep of one load case: the moment ramps linearly after the
/// settling phase and scalar equilibrium is solved by bisection at each step.
/// Throws Error("no_equilibrium") when the bracket cannot be established.
MotionSweep sweep_motion(const SegmentParams& p, Motion m, const SpineConstants& c);

/// Intact-segment curves for all four motions, sliced to the post-settling
/// window: the sixteen Eq.-2 targets keyed by canonical curve name.
std::map<std::string, Curve> generate_targets(const SegmentParams& intact,
                                              const SpineConstants& c);

/// Articulation kinematics from a resolved design point of the single- or
/// dual-articulation space.
TdrKinematics tdr_kinematics_from_point(const DesignPoint& point, const std::string& preset,
                                        const SpineConstants& c);

/// Hertz-like peak contact stress estimate, GPa.
double contact_stress_gpa(const TdrKinematics& kin, const SpineConstants& c);

} // namespace srsm
