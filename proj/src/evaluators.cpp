#include "srsm/evaluators.hpp"

#include "srsm/util.hpp"

#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace srsm {

void add_curve_mse_scalars(ResponseSet& rs, const std::map<std::string, Curve>& targets) {
  if (!rs.ok) return;
  for (const auto& [name, target] : targets) {
    auto it = rs.curves.find(name);
    if (it == rs.curves.end()) {
      rs = ResponseSet::failure("missing_curve:" + name);
      return;
    }
    const Curve candidate = slice_from(it->second, rs.settling_end);
    rs.scalars["mse_" + name] = curve_mse(candidate, target);
  }
}

std::string out_of_bounds_reason(const DesignPoint& point, const DesignSpace& space) {
  const Region full = Region::full(space);
  if (point.values.size() != full.center.size()) return "out_of_bounds";
  return full.contains(point.values) ? "" : "out_of_bounds";
}

// ---------------------------------------------------------------------------
// Benchmarks

BenchmarkEvaluator::BenchmarkEvaluator(DesignSpace space, std::string function)
    : space_(std::move(space)), function_(std::move(function)) {
  if (function_ != "sphere" && function_ != "quadratic" && function_ != "branin")
    throw Error("unknown benchmark function: " + function_);
  if (function_ == "branin" && space_.dim() != 2) throw Error("branin needs a 2-D space");
}

ResponseSet BenchmarkEvaluator::evaluate(const DesignPoint& point) const {
  if (auto why = out_of_bounds_reason(point, space_); !why.empty())
    return ResponseSet::failure(why);
  ResponseSet rs;
  double f = 0.0;
  if (function_ == "sphere") {
    for (double v : point.values) f += v * v;
  } else if (function_ == "quadratic") {
    const auto target = analytic_minimum();
    for (std::size_t i = 0; i < point.values.size(); ++i) {
      const double d = point.values[i] - target[i];
      f += d * d;
    }
  } else {  // branin
    const double a = point.values[0];
    const double b = point.values[1];
    const double t1 = b - 5.1 / (4.0 * M_PI * M_PI) * a * a + 5.0 / M_PI * a - 6.0;
    f = t1 * t1 + 10.0 * (1.0 - 1.0 / (8.0 * M_PI)) * std::cos(a) + 10.0;
  }
  rs.scalars["objective"] = f;
  return rs;
}

std::vector<double> BenchmarkEvaluator::analytic_minimum() const {
  std::vector<double> out;
  if (function_ == "sphere") {
    out.assign(space_.dim(), 0.0);
  } else if (function_ == "quadratic") {
    for (int i = 0; i < space_.dim(); ++i) {
      const auto& v = space_.sampled(i);
      out.push_back(v.lower + 0.3 * (v.upper - v.lower));
    }
  } else {
    out = {M_PI, 2.275};  // one of the three branin minima
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bone-implant interface surrogate

BoneSide bone_side_from_name(const std::string& name) {
  if (name == "inferior") return BoneSide::Inferior;
  if (name == "superior") return BoneSide::Superior;
  if (name == "combined") return BoneSide::Combined;
  throw Error("unknown bone side: " + name);
}

BoneSurrogate::BoneSurrogate(DesignSpace space, BoneSide side, BoneConstants constants)
    : space_(std::move(space)), side_(side), c_(constants) {}

namespace {

struct SideResponses {
  double d_subsidence, d_expulsion, d_micro, sigma_max_gpa;
  double bearing_area, tip_area, frontal_area;
};

SideResponses evaluate_bone_side(const DesignPoint& p, const DesignSpace& space,
                                 const BoneConstants& c, bool inferior) {
  const std::string endplate = inferior ? "bottom_" : "top_";
  const std::string fix = inferior ? "fix_2_" : "fix_1_";
  const double foot_x = space.constant_or(inferior ? "endplate_inferior_x" : "endplate_superior_x",
                                          inferior ? 15.0 : 12.0);
  const double foot_y =
      space.constant_or(inferior ? "endplate_inferior_y" : "endplate_superior_y", 17.0);

  // Bearing area: rectangular footprint minus rounded corners and the
  // projected loss of the asymmetric edge fillets.
  const double base_r = p.get(endplate + "base_radius");
  const double minor_ant = p.get(endplate + "minor_radius_anterior");
  const double minor_lat = p.get(endplate + "minor_radius_lateral");
  const double minor_pos = p.get(endplate + "minor_radius_posterior");
  const double corner_loss = (4.0 - M_PI) * base_r * base_r;
  const double fillet_loss =
      (1.0 - M_PI / 4.0) * (foot_y * (minor_ant + minor_pos) + 2.0 * foot_x * minor_lat);
  const double bearing_area = foot_x * foot_y - corner_loss - fillet_loss;

  const double n_spikes = p.get(fix + "number_x") * p.get(fix + "number_y");
  const double bottom_x = p.get(fix + "bottom_x_len");
  const double bottom_y = p.get(fix + "bottom_y_len");
  const double height = p.get(fix + "height");
  const double tip_x =
      bottom_x - p.get(fix + "top_x_shift_ant") - p.get(fix + "top_x_shift_pos");
  const double tip_y = bottom_y - 2.0 * p.get(fix + "top_y_shift_lat");
  const double tip_per_spike = std::max(0.0, tip_x) * std::max(0.0, tip_y);
  const double tip_area = tip_per_spike * n_spikes;

  // Frontal (anteroposterior-facing) area per spike is the trapezoid between
  // the base width and the tapered tip width over the spike height.
  const double frontal_area = n_spikes * 0.5 * (bottom_y + std::max(0.0, tip_y)) * height;

  if (bearing_area <= 0.0) throw Error("degenerate_geometry");
  const double hole_fraction = std::min(1.0, n_spikes * bottom_x * bottom_y / bearing_area);

  SideResponses r{};
  r.bearing_area = bearing_area;
  r.tip_area = tip_area;
  r.frontal_area = frontal_area;

  const double sub_denom =
      c.k_cortical * bearing_area * (1.0 - c.hole_beta * hole_fraction) + c.k_trabecular * tip_area;
  const double exp_denom = c.k_lock * frontal_area + c.k_friction * c.mu_eff * c.f_subsidence_n;
  if (sub_denom <= 0.0 || exp_denom <= 0.0 || tip_per_spike <= 0.0)
    throw Error("degenerate_geometry");

  r.d_subsidence = c.f_subsidence_n / sub_denom;
  r.d_expulsion = c.f_expulsion_n / exp_denom;
  r.d_micro = c.f_service_n / exp_denom;
  r.sigma_max_gpa = c.f_subsidence_n / (n_spikes * tip_per_spike) / 1000.0;
  return r;
}

} // namespace

ResponseSet BoneSurrogate::evaluate(const DesignPoint& point) const {
  if (auto why = out_of_bounds_reason(point, space_); !why.empty())
    return ResponseSet::failure(why);
  ResponseSet rs;
  try {
    if (side_ == BoneSide::Combined) {
      const auto inf = evaluate_bone_side(point, space_, c_, true);
      const auto sup = evaluate_bone_side(point, space_, c_, false);
      // The two interfaces stack in series under compression; migration and
      // stress are governed by the worse side.
      rs.scalars["d_subsidence"] = inf.d_subsidence + sup.d_subsidence;
      rs.scalars["d_expulsion"] = std::max(inf.d_expulsion, sup.d_expulsion);
      rs.scalars["d_micro"] = std::max(inf.d_micro, sup.d_micro);
      rs.scalars["sigma_max"] = std::max(inf.sigma_max_gpa, sup.sigma_max_gpa);
    } else {
      const auto side = evaluate_bone_side(point, space_, c_, side_ == BoneSide::Inferior);
      rs.scalars["d_subsidence"] = side.d_subsidence;
      rs.scalars["d_expulsion"] = side.d_expulsion;
      rs.scalars["d_micro"] = side.d_micro;
      rs.scalars["sigma_max"] = side.sigma_max_gpa;
      rs.scalars["bearing_area"] = side.bearing_area;
      rs.scalars["tip_area"] = side.tip_area;
      rs.scalars["frontal_area"] = side.frontal_area;
    }
  } catch (const Error&) {
    return ResponseSet::failure("degenerate_geometry");
  }
  return rs;
}

// ---------------------------------------------------------------------------
// Spinal segment surrogate

SpineSegmentEvaluator::SpineSegmentEvaluator(DesignSpace space, SpineConstants constants,
                                             std::map<std::string, Curve> targets)
    : space_(std::move(space)), constants_(std::move(constants)), targets_(std::move(targets)) {}

ResponseSet SpineSegmentEvaluator::evaluate_segment(const SegmentParams& params) const {
  ResponseSet rs;
  rs.settling_end = constants_.settling_s;
  double sigma = 0.0;
  double impingement = -std::numeric_limits<double>::infinity();
  try {
    for (Motion m : kAllMotions) {
      const MotionSweep sw = sweep_motion(params, m, constants_);
      const std::string suffix = "_" + motion_name(m);
      const std::pair<std::string, const std::vector<double>*> series[] = {
          {"strain_capsular", &sw.strain_capsular},
          {"strain_interspinal", &sw.strain_interspinal},
          {"strain_flavum", &sw.strain_flavum},
          {"force_facet", &sw.force_facet_n},
      };
      for (const auto& [base, data] : series) {
        Curve curve;
        curve.dt = constants_.dt_s;
        curve.quantity = base + suffix;
        curve.units = base == "force_facet" ? "N" : "strain";
        curve.values = *data;
        rs.curves[curve.quantity] = std::move(curve);
      }
      rs.scalars["theta_deg" + suffix] = sw.theta_rad.back() * 180.0 / M_PI;
      rs.scalars["t_ap_mm" + suffix] = sw.t_ap_mm.back();
      rs.scalars["peak_strain_interspinal" + suffix] =
          *std::max_element(sw.strain_interspinal.begin(), sw.strain_interspinal.end());
      rs.scalars["peak_force_facet" + suffix] =
          *std::max_element(sw.force_facet_n.begin(), sw.force_facet_n.end());
      impingement = std::max(impingement, sw.impingement);
    }
    sigma = params.tdr_mode ? contact_stress_gpa(params.tdr, constants_) : 0.0;
  } catch (const Error& e) {
    return ResponseSet::failure(e.what());
  }
  rs.scalars["sigma_max"] = sigma;
  rs.scalars["impingement"] = params.tdr_mode ? impingement : -1.0;
  add_curve_mse_scalars(rs, targets_);
  return rs;
}

ResponseSet SpineSegmentEvaluator::evaluate(const DesignPoint& point) const {
  if (auto why = out_of_bounds_reason(point, space_); !why.empty())
    return ResponseSet::failure(why);
  SegmentParams params = constants_.segment;
  params.tdr_mode = true;
  try {
    params.tdr = tdr_kinematics_from_point(point, space_.preset, constants_);
  } catch (const Error& e) {
    return ResponseSet::failure(e.what());
  }
  return evaluate_segment(params);
}

// ---------------------------------------------------------------------------
// External process bridge

ExternalProcessEvaluator::ExternalProcessEvaluator(DesignSpace space, std::string command_template,
                                                   std::string workdir, double timeout_s)
    : space_(std::move(space)),
      command_(std::move(command_template)),
      workdir_(std::move(workdir)),
      timeout_s_(timeout_s) {}

namespace {

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos))
    text.replace(pos, key.size(), value), pos += value.size();
  return text;
}

// Runs the command under /bin/sh in `cwd`; returns the exit code or -1 on
// timeout (the child is SIGKILLed).
int run_with_timeout(const std::string& command, const std::string& cwd, double timeout_s) {
  const pid_t pid = fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(127);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw Error("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      return -1;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

bool parse_scalar(const std::string& text, double& out) {
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != nullptr && end != text.c_str() && *end == '\0';
}

} // namespace

ResponseSet ExternalProcessEvaluator::evaluate(const DesignPoint& point) const {
  if (auto why = out_of_bounds_reason(point, space_); !why.empty())
    return ResponseSet::failure(why);

  const fs::path eval_dir = fs::path(workdir_) / ("eval_" + std::to_string(point.id));
  std::error_code ec;
  fs::create_directories(eval_dir, ec);
  if (ec) return ResponseSet::failure("workdir_error:" + ec.message());

  std::string design;
  for (const auto& var : space_.variables)
    design += var.name + " = " + format_double(point.get(var.name)) + "\n";
  const fs::path design_path = eval_dir / "design.txt";
  try {
    write_text_file(design_path.string(), design);
  } catch (const Error& e) {
    return ResponseSet::failure(std::string("io_error:") + e.what());
  }

  std::string cmd = substitute(command_, "{design}", design_path.string());
  cmd = substitute(cmd, "{workdir}", eval_dir.string());
  const int code = run_with_timeout(cmd, eval_dir.string(), timeout_s_);
  if (code == -1) return ResponseSet::failure("timeout");
  if (code != 0) return ResponseSet::failure("exit_code_" + std::to_string(code));

  const fs::path responses_path = eval_dir / "responses.csv";
  if (!fs::exists(responses_path)) return ResponseSet::failure("missing_responses_csv");

  ResponseSet rs;
  std::ifstream in(responses_path);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    return ResponseSet::failure("parse_error:responses.csv needs header and value rows");
  const auto names = split_csv_line(header);
  const auto values = split_csv_line(row);
  if (names.size() != values.size() || names.empty())
    return ResponseSet::failure("parse_error:responses.csv column mismatch");
  for (std::size_t i = 0; i < names.size(); ++i) {
    double v = 0.0;
    if (!parse_scalar(values[i], v) || !std::isfinite(v))
      return ResponseSet::failure("parse_error:bad value for " + names[i]);
    rs.scalars[names[i]] = v;
  }
  if (auto it = rs.scalars.find("settling_end"); it != rs.scalars.end()) {
    rs.settling_end = it->second;
    rs.scalars.erase(it);
  }

  std::vector<fs::path> curve_files;
  for (const auto& entry : fs::directory_iterator(eval_dir)) {
    const std::string fname = entry.path().filename().string();
    if (fname.rfind("curve_", 0) == 0 && entry.path().extension() == ".csv")
      curve_files.push_back(entry.path());
  }
  std::sort(curve_files.begin(), curve_files.end());
  for (const auto& path : curve_files) {
    const std::string name = path.stem().string().substr(6);
    std::ifstream cf(path);
    std::string line;
    std::vector<double> times, vals;
    bool first = true;
    while (std::getline(cf, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != 2) return ResponseSet::failure("parse_error:" + name);
      double t = 0.0, v = 0.0;
      if (!parse_scalar(fields[0], t) || !parse_scalar(fields[1], v)) {
        if (first) {  // header line
          first = false;
          continue;
        }
        return ResponseSet::failure("parse_error:" + name);
      }
      first = false;
      times.push_back(t);
      vals.push_back(v);
    }
    if (vals.size() < 2) return ResponseSet::failure("parse_error:" + name + " too short");
    const double dt = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i)
      if (std::abs(times[i] - times[i - 1] - dt) > 1e-9)
        return ResponseSet::failure("parse_error:" + name + " not uniformly sampled");
    Curve curve;
    curve.dt = dt;
    curve.values = std::move(vals);
    curve.quantity = name;
    rs.curves[name] = std::move(curve);
  }
  return rs;
}

} // namespace srsm
