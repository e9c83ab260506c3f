#include "srsm/spine_model.hpp"

#include "srsm/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srsm {

std::string motion_name(Motion m) {
  switch (m) {
    case Motion::Flexion: return "flexion";
    case Motion::Extension: return "extension";
    case Motion::LateralBending: return "lateral_bending";
    case Motion::AxialRotation: return "axial_rotation";
  }
  throw Error("bad motion");
}

Motion motion_from_name(const std::string& name) {
  for (Motion m : kAllMotions)
    if (motion_name(m) == name) return m;
  throw Error("unknown motion: " + name);
}

double MotionMap::at(Motion m) const {
  switch (m) {
    case Motion::Flexion: return flexion;
    case Motion::Extension: return extension;
    case Motion::LateralBending: return lateral_bending;
    case Motion::AxialRotation: return axial_rotation;
  }
  throw Error("bad motion");
}

double& MotionMap::at(Motion m) {
  switch (m) {
    case Motion::Flexion: return flexion;
    case Motion::Extension: return extension;
    case Motion::LateralBending: return lateral_bending;
    case Motion::AxialRotation: return axial_rotation;
  }
  throw Error("bad motion");
}

namespace {

constexpr double kDegPerRad = 180.0 / M_PI;

// Intact-segment defaults. Ligament and facet properties are desk-scale
// lumped stand-ins; the per-motion joint stiffnesses are calibrated so the
// preoperative segment reproduces the reference kinematics (flexion 5.48 deg
// with 1.03 mm AP translation, extension -6.16 deg, lateral 3.20 deg, axial
// 2.49 deg) and facet force peaks (53.77 N extension, 47.41 N axial,
// 8.04 N lateral) under the standard load cases.
SegmentParams default_segment() {
  SegmentParams s;
  s.capsular = {8.0, 0.02, 30.0, 0.5, {25.0, 25.0, 15.0, 18.0}};
  s.interspinal = {10.0, 0.0, 20.0, 1.0, {56.0, 56.0, 10.0, 8.0}};
  s.flavum = {12.0, 0.01, 25.0, 0.3, {35.0, 35.0, 12.0, 10.0}};
  s.facet.stiffness = {1.0, 10.42, 3.654, 23.824};
  s.facet.engage_deg = {0.5, 1.0, 1.0, 0.5};
  s.facet.lever = {10.0, 4.0, 10.0, 10.0};
  s.intact.rotational_stiffness = {5413.0, 7301.0, 29502.0, 29103.0};
  s.intact.kappa = {0.19, 0.19, 0.05, 0.05};
  return s;
}

double ligament_strain(const LigamentParams& lig, Motion m, double theta_rad, double t_ap) {
  const double elongation = lig.lever.at(m) * theta_rad + lig.translation_coupling * t_ap;
  return std::max(0.0, elongation / lig.rest_length - lig.slack_strain);
}

double facet_force(const FacetParams& facet, Motion m, double theta_rad) {
  const double past = std::abs(theta_rad) * kDegPerRad - facet.engage_deg.at(m);
  return facet.stiffness.at(m) * std::max(0.0, past);
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

} // namespace

SpineConstants SpineConstants::defaults() {
  SpineConstants c;
  c.segment = default_segment();
  return c;
}

LoadCase load_case_for(Motion m, const SpineConstants& c) {
  LoadCase lc;
  lc.name = motion_name(m);
  lc.preload_n = c.preload_n;
  lc.moment_nm = c.moment_nm.at(m) * (m == Motion::Extension ? -1.0 : 1.0);
  lc.ramp_duration_s = c.ramp_s;
  lc.settling_s = c.settling_s;
  return lc;
}

double ap_translation(const SegmentParams& p, Motion m, double theta_rad) {
  if (!p.tdr_mode) return p.intact.kappa.at(m) * theta_rad * kDegPerRad;
  const double raw = p.tdr.center_offset * (1.0 - std::cos(theta_rad)) +
                     p.tdr.effective_radius * std::sin(theta_rad);
  return std::clamp(raw, -p.tdr.travel_posterior, p.tdr.travel_anterior);
}

double resisting_moment(const SegmentParams& p, Motion m, double theta_rad,
                        const SpineConstants& c) {
  (void)c;
  const double t_ap = ap_translation(p, m, theta_rad);
  double moment =
      p.tdr_mode
          ? (p.tdr.bearing_stiffness + p.tdr.articulation_stiffness.at(m)) * theta_rad
          : p.intact.rotational_stiffness.at(m) * theta_rad;
  for (const auto* lig : {&p.capsular, &p.interspinal, &p.flavum}) {
    const double strain = ligament_strain(*lig, m, theta_rad, t_ap);
    moment += lig->lever.at(m) * lig->stiffness * strain;
  }
  moment += sign_of(theta_rad) * p.facet.lever.at(m) * facet_force(p.facet, m, theta_rad);
  return moment;
}

namespace {

// Solves resisting_moment(theta) = target by bisection; target and theta
// share a sign. The resisting moment is strictly increasing, so the root is
// unique when the bracket exists.
double solve_equilibrium(const SegmentParams& p, Motion m, double target_nmm,
                         const SpineConstants& c) {
  if (target_nmm == 0.0) return 0.0;
  const double s = sign_of(target_nmm);
  double lo = 0.0;
  double hi = c.max_angle_rad;
  if (std::abs(resisting_moment(p, m, s * hi, c)) < std::abs(target_nmm))
    throw Error("no_equilibrium: applied moment exceeds segment capacity");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(resisting_moment(p, m, s * mid, c)) < std::abs(target_nmm))
      lo = mid;
    else
      hi = mid;
  }
  return s * 0.5 * (lo + hi);
}

} // namespace

MotionSweep sweep_motion(const SegmentParams& p, Motion m, const SpineConstants& c) {
  const LoadCase lc = load_case_for(m, c);
  const double total = lc.settling_s + lc.ramp_duration_s;
  const auto steps = static_cast<std::size_t>(std::llround(total / c.dt_s)) + 1;

  MotionSweep sw;
  sw.impingement = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * c.dt_s;
    const double ramp =
        std::clamp((t - lc.settling_s) / lc.ramp_duration_s, 0.0, 1.0);
    const double moment_nmm = lc.moment_nm * 1000.0 * ramp;
    const double theta = solve_equilibrium(p, m, moment_nmm, c);
    const double t_ap = ap_translation(p, m, theta);

    sw.time_s.push_back(t);
    sw.moment_nmm.push_back(moment_nmm);
    sw.theta_rad.push_back(theta);
    sw.t_ap_mm.push_back(t_ap);
    sw.strain_capsular.push_back(ligament_strain(p.capsular, m, theta, t_ap));
    sw.strain_interspinal.push_back(ligament_strain(p.interspinal, m, theta, t_ap));
    sw.strain_flavum.push_back(ligament_strain(p.flavum, m, theta, t_ap));
    sw.force_facet_n.push_back(facet_force(p.facet, m, theta));

    if (p.tdr_mode) {
      for (const auto& iface : p.tdr.interfaces) {
        const double required =
            c.impingement_factor * std::abs(theta) * p.tdr.theta_share * iface.radius;
        sw.impingement = std::max(sw.impingement, required - iface.avail_clearance);
      }
    }
  }
  if (!p.tdr_mode || p.tdr.interfaces.empty()) sw.impingement = -1.0;
  return sw;
}

std::map<std::string, Curve> generate_targets(const SegmentParams& intact,
                                              const SpineConstants& c) {
  if (intact.tdr_mode) throw Error("generate_targets expects intact-mode parameters");
  std::map<std::string, Curve> targets;
  for (Motion m : kAllMotions) {
    const MotionSweep sw = sweep_motion(intact, m, c);
    const std::string suffix = "_" + motion_name(m);
    const std::pair<std::string, const std::vector<double>*> series[] = {
        {"strain_capsular", &sw.strain_capsular},
        {"strain_interspinal", &sw.strain_interspinal},
        {"strain_flavum", &sw.strain_flavum},
        {"force_facet", &sw.force_facet_n},
    };
    for (const auto& [base, data] : series) {
      Curve curve;
      curve.dt = c.dt_s;
      curve.quantity = base + suffix;
      curve.units = base == "force_facet" ? "N" : "strain";
      curve.values = *data;
      targets[curve.quantity] = slice_from(curve, c.settling_s);
    }
  }
  return targets;
}

TdrKinematics tdr_kinematics_from_point(const DesignPoint& point, const std::string& preset,
                                        const SpineConstants& c) {
  TdrKinematics kin;
  kin.bearing_stiffness = c.bearing_stiffness;
  const double k = c.scale;

  auto depth_factor = [&](double depth) {
    return std::clamp(depth, 0.0, c.travel_depth_ref) / c.travel_depth_ref;
  };
  auto side_travel = [&](double torus_radius, double depth, double offset) {
    return std::max(c.clearance,
                    c.clearance + c.travel_per_torus * k * torus_radius * depth_factor(k * depth) +
                        offset);
  };
  auto wedge_stiffness = [&](double radius) {
    return c.preload_n * radius * radius / c.clearance;  // N*mm/rad
  };

  if (preset == "single_articulation") {
    const double depth = std::max(0.0, point.get("trough_depth"));
    const double offset = k * point.get("cylinder_offset");
    kin.effective_radius = k * point.get("sphere_radius");
    kin.center_offset = k * point.get("sphere_origin_xshift");
    kin.travel_anterior = side_travel(point.get("torus1_radius1"), depth, offset);
    kin.travel_posterior = side_travel(point.get("torus2_radius1"), depth, -offset);
    kin.theta_share = 1.0;
    kin.interfaces.push_back(
        {kin.effective_radius, k * (depth + 0.5 * point.get("cylinder_height"))});
    kin.contact_radius = kin.effective_radius;
    for (Motion m : kAllMotions)
      kin.articulation_stiffness.at(m) =
          c.congruence.at(m) * wedge_stiffness(kin.effective_radius);
    return kin;
  }
  if (preset == "dual_articulation") {
    const double r_top = k * point.get("middle_top_sphere_R");
    const double r_bot = k * point.get("middle_bottom_sphere_R");
    kin.effective_radius = 0.5 * (r_top + r_bot);
    kin.center_offset = k * point.get("midline_xshift");
    kin.theta_share = 0.5;
    kin.travel_anterior = 0.0;
    kin.travel_posterior = 0.0;
    for (const char* side : {"sup", "inf"}) {
      const std::string sfx = std::string("_") + side;
      const double depth = std::max(0.0, point.get("trough_depth" + sfx));
      const double offset = k * point.get("cylinder_offset" + sfx);
      kin.travel_anterior += side_travel(point.get("torus1_radius1" + sfx), depth, offset);
      kin.travel_posterior += side_travel(point.get("torus2_radius1" + sfx), depth, -offset);
      const double radius = side == std::string("sup") ? r_top : r_bot;
      kin.interfaces.push_back(
          {radius, k * (depth + 0.5 * point.get("cylinder_height" + sfx))});
    }
    kin.contact_radius = std::min(r_top, r_bot);
    // Both interfaces rotate in series; their wedge stiffnesses combine
    // harmonically.
    const double k_top = wedge_stiffness(r_top);
    const double k_bot = wedge_stiffness(r_bot);
    const double series = k_top * k_bot / (k_top + k_bot);
    for (Motion m : kAllMotions) kin.articulation_stiffness.at(m) = c.congruence.at(m) * series;
    return kin;
  }
  throw Error("tdr_kinematics_from_point: unsupported preset " + preset);
}

double contact_stress_gpa(const TdrKinematics& kin, const SpineConstants& c) {
  const double denom = M_PI * kin.contact_radius * c.clearance * c.hertz_kappa;
  if (denom <= 0.0) throw Error("degenerate_geometry: zero contact area");
  return c.hertz_c * c.preload_n / denom / 1000.0;
}

} // namespace srsm
