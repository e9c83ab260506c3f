#include "srsm/config.hpp"

#include "srsm/persist.hpp"
#include "srsm/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <set>

using nlohmann::json;
namespace fs = std::filesystem;

namespace srsm {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
  throw Error("config error at " + path + ": " + message);
}

void expect_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) config_error(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) config_error(path + "." + key, "unknown key");
}

double get_num(const json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) config_error(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

long get_int(const json& j, const std::string& path, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) config_error(path + "." + key, "expected an integer");
  return j.at(key).get<long>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) config_error(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

MotionMap parse_motion_map(const json& j, const std::string& path, MotionMap fallback) {
  expect_keys(j, path, {"flexion", "extension", "lateral_bending", "axial_rotation"});
  fallback.flexion = get_num(j, path, "flexion", fallback.flexion);
  fallback.extension = get_num(j, path, "extension", fallback.extension);
  fallback.lateral_bending = get_num(j, path, "lateral_bending", fallback.lateral_bending);
  fallback.axial_rotation = get_num(j, path, "axial_rotation", fallback.axial_rotation);
  return fallback;
}

LigamentParams parse_ligament(const json& j, const std::string& path, LigamentParams base) {
  expect_keys(j, path, {"rest_length", "slack_strain", "stiffness", "translation_coupling",
                        "lever"});
  base.rest_length = get_num(j, path, "rest_length", base.rest_length);
  base.slack_strain = get_num(j, path, "slack_strain", base.slack_strain);
  base.stiffness = get_num(j, path, "stiffness", base.stiffness);
  base.translation_coupling = get_num(j, path, "translation_coupling", base.translation_coupling);
  if (j.contains("lever")) base.lever = parse_motion_map(j.at("lever"), path + ".lever", base.lever);
  return base;
}

SpineConstants parse_spine_constants(const json& j, const std::string& path, SpineConstants c) {
  expect_keys(j, path,
              {"preload_n", "moment_nm", "ramp_s", "settling_s", "dt_s", "scale", "clearance",
               "bearing_stiffness", "travel_per_torus", "travel_depth_ref", "impingement_factor",
               "congruence", "hertz_c", "hertz_kappa", "max_angle_rad", "segment"});
  c.preload_n = get_num(j, path, "preload_n", c.preload_n);
  if (j.contains("moment_nm"))
    c.moment_nm = parse_motion_map(j.at("moment_nm"), path + ".moment_nm", c.moment_nm);
  c.ramp_s = get_num(j, path, "ramp_s", c.ramp_s);
  c.settling_s = get_num(j, path, "settling_s", c.settling_s);
  c.dt_s = get_num(j, path, "dt_s", c.dt_s);
  c.scale = get_num(j, path, "scale", c.scale);
  c.clearance = get_num(j, path, "clearance", c.clearance);
  c.bearing_stiffness = get_num(j, path, "bearing_stiffness", c.bearing_stiffness);
  c.travel_per_torus = get_num(j, path, "travel_per_torus", c.travel_per_torus);
  c.travel_depth_ref = get_num(j, path, "travel_depth_ref", c.travel_depth_ref);
  c.impingement_factor = get_num(j, path, "impingement_factor", c.impingement_factor);
  if (j.contains("congruence"))
    c.congruence = parse_motion_map(j.at("congruence"), path + ".congruence", c.congruence);
  c.hertz_c = get_num(j, path, "hertz_c", c.hertz_c);
  c.hertz_kappa = get_num(j, path, "hertz_kappa", c.hertz_kappa);
  c.max_angle_rad = get_num(j, path, "max_angle_rad", c.max_angle_rad);
  if (j.contains("segment")) {
    const json& s = j.at("segment");
    const std::string sp = path + ".segment";
    expect_keys(s, sp, {"capsular", "interspinal", "flavum", "facet", "intact", "scale"});
    auto& seg = c.segment;
    if (s.contains("capsular"))
      seg.capsular = parse_ligament(s.at("capsular"), sp + ".capsular", seg.capsular);
    if (s.contains("interspinal"))
      seg.interspinal = parse_ligament(s.at("interspinal"), sp + ".interspinal", seg.interspinal);
    if (s.contains("flavum"))
      seg.flavum = parse_ligament(s.at("flavum"), sp + ".flavum", seg.flavum);
    if (s.contains("facet")) {
      const json& f = s.at("facet");
      expect_keys(f, sp + ".facet", {"stiffness", "engage_deg", "lever"});
      if (f.contains("stiffness"))
        seg.facet.stiffness =
            parse_motion_map(f.at("stiffness"), sp + ".facet.stiffness", seg.facet.stiffness);
      if (f.contains("engage_deg"))
        seg.facet.engage_deg =
            parse_motion_map(f.at("engage_deg"), sp + ".facet.engage_deg", seg.facet.engage_deg);
      if (f.contains("lever"))
        seg.facet.lever = parse_motion_map(f.at("lever"), sp + ".facet.lever", seg.facet.lever);
    }
    if (s.contains("intact")) {
      const json& i = s.at("intact");
      expect_keys(i, sp + ".intact", {"rotational_stiffness", "kappa"});
      if (i.contains("rotational_stiffness"))
        seg.intact.rotational_stiffness =
            parse_motion_map(i.at("rotational_stiffness"), sp + ".intact.rotational_stiffness",
                             seg.intact.rotational_stiffness);
      if (i.contains("kappa"))
        seg.intact.kappa = parse_motion_map(i.at("kappa"), sp + ".intact.kappa", seg.intact.kappa);
    }
    seg.scale = get_num(s, sp, "scale", seg.scale);
  }
  return c;
}

BoneConstants parse_bone_constants(const json& j, const std::string& path, BoneConstants c) {
  expect_keys(j, path,
              {"f_subsidence_n", "f_expulsion_n", "f_service_n", "k_cortical", "k_trabecular",
               "hole_beta", "k_lock", "k_friction", "mu_eff"});
  c.f_subsidence_n = get_num(j, path, "f_subsidence_n", c.f_subsidence_n);
  c.f_expulsion_n = get_num(j, path, "f_expulsion_n", c.f_expulsion_n);
  c.f_service_n = get_num(j, path, "f_service_n", c.f_service_n);
  c.k_cortical = get_num(j, path, "k_cortical", c.k_cortical);
  c.k_trabecular = get_num(j, path, "k_trabecular", c.k_trabecular);
  c.hole_beta = get_num(j, path, "hole_beta", c.hole_beta);
  c.k_lock = get_num(j, path, "k_lock", c.k_lock);
  c.k_friction = get_num(j, path, "k_friction", c.k_friction);
  c.mu_eff = get_num(j, path, "mu_eff", c.mu_eff);
  return c;
}

DesignSpace parse_custom_space(const json& j, const std::string& path) {
  expect_keys(j, path, {"variables", "constants"});
  if (!j.contains("variables")) config_error(path, "custom space needs variables");
  DesignSpace s;
  s.preset = "custom";
  int idx = 0;
  for (const auto& vj : j.at("variables")) {
    const std::string vp = path + ".variables[" + std::to_string(idx++) + "]";
    expect_keys(vj, vp, {"name", "kind", "lower", "upper", "levels", "dependent_rule"});
    VariableSpec v;
    v.name = get_str(vj, vp, "name", "");
    const std::string kind = get_str(vj, vp, "kind", "continuous");
    if (kind == "continuous")
      v.kind = VarKind::Continuous;
    else if (kind == "discrete")
      v.kind = VarKind::Discrete;
    else
      config_error(vp + ".kind", "must be continuous or discrete");
    v.lower = get_num(vj, vp, "lower", 0.0);
    v.upper = get_num(vj, vp, "upper", 0.0);
    if (vj.contains("levels")) v.levels = vj.at("levels").get<std::vector<double>>();
    if (v.kind == VarKind::Discrete && !v.levels.empty()) {
      v.lower = v.levels.front();
      v.upper = v.levels.back();
    }
    v.dependent_rule = get_str(vj, vp, "dependent_rule", "");
    s.variables.push_back(std::move(v));
  }
  if (j.contains("constants"))
    s.preset_constants = j.at("constants").get<std::map<std::string, double>>();
  s.validate();
  return s;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number for the error message.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i)
      if (json_text[i] == '\n') ++line;
    throw Error(origin + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }

  expect_keys(j, origin,
              {"description", "preset", "space", "constants", "baseline", "evaluator", "objective",
               "constraints", "sampler", "optimizer", "termination", "domain_reduction",
               "reuse_window", "seed", "parallelism", "output_dir", "mode"});

  RunConfig cfg;
  cfg.description = get_str(j, origin, "description", "");
  cfg.preset = get_str(j, origin, "preset", "custom");
  if (cfg.preset == "custom") {
    if (!j.contains("space")) config_error(origin, "preset custom requires a space block");
    cfg.space = parse_custom_space(j.at("space"), origin + ".space");
  } else {
    if (j.contains("space")) config_error(origin + ".space", "only valid with preset custom");
    cfg.space = make_preset(cfg.preset);
  }
  if (j.contains("constants"))
    for (const auto& [k, v] : j.at("constants").items()) {
      if (!v.is_number()) config_error(origin + ".constants." + k, "expected a number");
      cfg.space.preset_constants[k] = v.get<double>();
    }
  if (j.contains("baseline"))
    cfg.baseline_override = j.at("baseline").get<std::map<std::string, double>>();

  if (!j.contains("evaluator")) config_error(origin, "missing evaluator block");
  {
    const json& e = j.at("evaluator");
    const std::string ep = origin + ".evaluator";
    expect_keys(e, ep,
                {"type", "side", "constants", "targets_csv", "function", "command", "workdir",
                 "timeout_s"});
    cfg.evaluator_type = get_str(e, ep, "type", "");
    if (cfg.evaluator_type == "bone_surrogate") {
      cfg.bone_side = get_str(e, ep, "side", "inferior");
      if (e.contains("constants"))
        cfg.bone = parse_bone_constants(e.at("constants"), ep + ".constants", cfg.bone);
    } else if (cfg.evaluator_type == "spine_tdr") {
      cfg.targets_csv = get_str(e, ep, "targets_csv", "");
      if (e.contains("constants"))
        cfg.spine = parse_spine_constants(e.at("constants"), ep + ".constants", cfg.spine);
    } else if (cfg.evaluator_type == "benchmark") {
      cfg.benchmark_function = get_str(e, ep, "function", "sphere");
    } else if (cfg.evaluator_type == "external") {
      cfg.external_command = get_str(e, ep, "command", "");
      cfg.external_workdir = get_str(e, ep, "workdir", "");
      cfg.external_timeout_s = get_num(e, ep, "timeout_s", cfg.external_timeout_s);
      cfg.targets_csv = get_str(e, ep, "targets_csv", "");
      if (cfg.external_command.empty()) config_error(ep, "external evaluator needs a command");
    } else {
      config_error(ep + ".type", "unknown evaluator type '" + cfg.evaluator_type + "'");
    }
  }

  if (!j.contains("objective")) config_error(origin, "missing objective block");
  {
    const json& o = j.at("objective");
    const std::string op = origin + ".objective";
    expect_keys(o, op, {"kind", "w1", "w2", "weights", "responses", "response"});
    cfg.objective_kind = get_str(o, op, "kind", "");
    if (cfg.objective_kind == "eq1") {
      cfg.w1 = get_num(o, op, "w1", 1.0);
      cfg.w2 = get_num(o, op, "w2", 1.0);
    } else if (cfg.objective_kind == "eq2") {
      if (o.contains("responses"))
        cfg.eq2_responses = o.at("responses").get<std::vector<std::string>>();
      if (o.contains("weights")) cfg.eq2_weights = o.at("weights").get<std::vector<double>>();
    } else if (cfg.objective_kind == "scalar") {
      cfg.scalar_response = get_str(o, op, "response", "objective");
    } else {
      config_error(op + ".kind", "must be eq1, eq2 or scalar");
    }
  }

  if (j.contains("constraints")) {
    int idx = 0;
    for (const auto& cj : j.at("constraints")) {
      const std::string cp = origin + ".constraints[" + std::to_string(idx++) + "]";
      expect_keys(cj, cp, {"response", "bound", "direction", "scale"});
      ConstraintSpec spec;
      spec.response = get_str(cj, cp, "response", "");
      if (spec.response.empty()) config_error(cp, "constraint needs a response");
      spec.bound = get_num(cj, cp, "bound", 0.0);
      const std::string dir = get_str(cj, cp, "direction", "le");
      if (dir == "le")
        spec.direction = ConstraintDirection::LessEqual;
      else if (dir == "ge")
        spec.direction = ConstraintDirection::GreaterEqual;
      else
        config_error(cp + ".direction", "must be le or ge");
      spec.scale = get_num(cj, cp, "scale", 0.0);
      cfg.constraints.push_back(spec);
    }
  }

  auto& st = cfg.settings;
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    const std::string sp = origin + ".sampler";
    expect_keys(s, sp, {"samples_per_iteration", "pool_factor", "max_rejects"});
    st.samples_per_iteration =
        static_cast<int>(get_int(s, sp, "samples_per_iteration", st.samples_per_iteration));
    st.sampler.pool_factor = static_cast<int>(get_int(s, sp, "pool_factor", st.sampler.pool_factor));
    st.sampler.max_rejects = get_int(s, sp, "max_rejects", st.sampler.max_rejects);
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    const std::string op = origin + ".optimizer";
    expect_keys(o, op,
                {"population", "generations", "crossover_rate", "mutation_rate", "blend_alpha",
                 "penalty_factor", "refine_steps", "refine_tol"});
    st.optimizer.population = static_cast<int>(get_int(o, op, "population", st.optimizer.population));
    st.optimizer.generations =
        static_cast<int>(get_int(o, op, "generations", st.optimizer.generations));
    st.optimizer.crossover_rate = get_num(o, op, "crossover_rate", st.optimizer.crossover_rate);
    st.optimizer.mutation_rate = get_num(o, op, "mutation_rate", st.optimizer.mutation_rate);
    st.optimizer.blend_alpha = get_num(o, op, "blend_alpha", st.optimizer.blend_alpha);
    st.optimizer.penalty_factor = get_num(o, op, "penalty_factor", st.optimizer.penalty_factor);
    st.optimizer.refine_steps =
        static_cast<int>(get_int(o, op, "refine_steps", st.optimizer.refine_steps));
    st.optimizer.refine_tol = get_num(o, op, "refine_tol", st.optimizer.refine_tol);
  }
  if (j.contains("termination")) {
    const json& t = j.at("termination");
    const std::string tp = origin + ".termination";
    expect_keys(t, tp, {"tol_p", "tol_f", "max_iterations"});
    st.termination.tol_p = get_num(t, tp, "tol_p", st.termination.tol_p);
    st.termination.tol_f = get_num(t, tp, "tol_f", st.termination.tol_f);
    st.termination.max_iterations =
        static_cast<int>(get_int(t, tp, "max_iterations", st.termination.max_iterations));
  }
  if (j.contains("domain_reduction")) {
    const json& d = j.at("domain_reduction");
    const std::string dp = origin + ".domain_reduction";
    expect_keys(d, dp, {"gamma_shrink", "gamma_osc", "gamma_pan", "pan_threshold",
                        "resolution_floor"});
    st.reduction.gamma_shrink = get_num(d, dp, "gamma_shrink", st.reduction.gamma_shrink);
    st.reduction.gamma_osc = get_num(d, dp, "gamma_osc", st.reduction.gamma_osc);
    st.reduction.gamma_pan = get_num(d, dp, "gamma_pan", st.reduction.gamma_pan);
    st.reduction.pan_threshold = get_num(d, dp, "pan_threshold", st.reduction.pan_threshold);
    st.reduction.resolution_floor =
        get_num(d, dp, "resolution_floor", st.reduction.resolution_floor);
  }
  st.reuse_window = get_num(j, origin, "reuse_window", st.reuse_window);
  st.seed = static_cast<std::uint64_t>(get_int(j, origin, "seed", 42));
  st.parallelism = static_cast<int>(get_int(j, origin, "parallelism", 1));
  cfg.output_dir = get_str(j, origin, "output_dir", "run");
  cfg.mode = get_str(j, origin, "mode", "single");
  if (cfg.mode != "single" && cfg.mode != "split_then_combine")
    config_error(origin + ".mode", "must be single or split_then_combine");
  if (cfg.mode == "split_then_combine" && cfg.evaluator_type != "bone_surrogate")
    config_error(origin + ".mode", "split_then_combine requires the bone evaluator");

  if (st.samples_per_iteration < 1) {
    // Paper profiles: 125 designs per bone-interface iteration, 30 for the
    // single articulation, 100 for the dual articulation.
    if (cfg.preset == "single_articulation")
      st.samples_per_iteration = 30;
    else if (cfg.preset == "dual_articulation")
      st.samples_per_iteration = 100;
    else if (cfg.preset.rfind("bone", 0) == 0)
      st.samples_per_iteration = 125;
    else
      st.samples_per_iteration = 10 * std::max(1, cfg.space.dim());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_text_file(path.string()), path.string());
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  if (!cfg.description.empty()) j["description"] = cfg.description;
  j["preset"] = cfg.preset;
  if (cfg.preset == "custom") {
    json vars = json::array();
    for (const auto& v : cfg.space.variables) {
      json vj;
      vj["name"] = v.name;
      vj["kind"] = v.kind == VarKind::Discrete ? "discrete" : "continuous";
      if (v.is_dependent()) {
        vj["dependent_rule"] = v.dependent_rule;
      } else if (v.kind == VarKind::Discrete) {
        vj["levels"] = v.levels;
      } else {
        vj["lower"] = v.lower;
        vj["upper"] = v.upper;
      }
      vars.push_back(vj);
    }
    j["space"] = json{{"variables", vars}, {"constants", cfg.space.preset_constants}};
  }
  if (!cfg.baseline_override.empty()) j["baseline"] = cfg.baseline_override;

  json e;
  e["type"] = cfg.evaluator_type;
  if (cfg.evaluator_type == "bone_surrogate") e["side"] = cfg.bone_side;
  if ((cfg.evaluator_type == "spine_tdr" || cfg.evaluator_type == "external") &&
      !cfg.targets_csv.empty())
    e["targets_csv"] = cfg.targets_csv;
  if (cfg.evaluator_type == "benchmark") e["function"] = cfg.benchmark_function;
  if (cfg.evaluator_type == "external") {
    e["command"] = cfg.external_command;
    e["workdir"] = cfg.external_workdir;
    e["timeout_s"] = cfg.external_timeout_s;
  }
  j["evaluator"] = e;

  json o;
  o["kind"] = cfg.objective_kind;
  if (cfg.objective_kind == "eq1") {
    o["w1"] = cfg.w1;
    o["w2"] = cfg.w2;
  } else if (cfg.objective_kind == "eq2") {
    if (!cfg.eq2_responses.empty()) o["responses"] = cfg.eq2_responses;
    if (!cfg.eq2_weights.empty()) o["weights"] = cfg.eq2_weights;
  } else {
    o["response"] = cfg.scalar_response;
  }
  j["objective"] = o;

  json cs = json::array();
  for (const auto& c : cfg.constraints) {
    json cj;
    cj["response"] = c.response;
    cj["bound"] = c.bound;
    cj["direction"] = c.direction == ConstraintDirection::LessEqual ? "le" : "ge";
    if (c.scale > 0.0) cj["scale"] = c.scale;
    cs.push_back(cj);
  }
  j["constraints"] = cs;

  j["sampler"] = json{{"samples_per_iteration", cfg.settings.samples_per_iteration},
                      {"pool_factor", cfg.settings.sampler.pool_factor},
                      {"max_rejects", cfg.settings.sampler.max_rejects}};
  j["optimizer"] = json{{"population", cfg.settings.optimizer.population},
                        {"generations", cfg.settings.optimizer.generations},
                        {"crossover_rate", cfg.settings.optimizer.crossover_rate},
                        {"mutation_rate", cfg.settings.optimizer.mutation_rate},
                        {"blend_alpha", cfg.settings.optimizer.blend_alpha},
                        {"penalty_factor", cfg.settings.optimizer.penalty_factor},
                        {"refine_steps", cfg.settings.optimizer.refine_steps},
                        {"refine_tol", cfg.settings.optimizer.refine_tol}};
  j["termination"] = json{{"tol_p", cfg.settings.termination.tol_p},
                          {"tol_f", cfg.settings.termination.tol_f},
                          {"max_iterations", cfg.settings.termination.max_iterations}};
  j["domain_reduction"] = json{{"gamma_shrink", cfg.settings.reduction.gamma_shrink},
                               {"gamma_osc", cfg.settings.reduction.gamma_osc},
                               {"gamma_pan", cfg.settings.reduction.gamma_pan},
                               {"pan_threshold", cfg.settings.reduction.pan_threshold},
                               {"resolution_floor", cfg.settings.reduction.resolution_floor}};
  j["reuse_window"] = cfg.settings.reuse_window;
  j["seed"] = cfg.settings.seed;
  j["parallelism"] = cfg.settings.parallelism;
  j["output_dir"] = cfg.output_dir;
  if (cfg.mode != "single") j["mode"] = cfg.mode;
  return j.dump(2) + "\n";
}

ObjectiveSpec build_objective(const RunConfig& cfg) {
  ObjectiveSpec spec;
  if (cfg.objective_kind == "eq1") {
    spec.kind = ObjectiveKind::WeightedScalar;
    spec.terms.push_back({"d_subsidence", cfg.w1, true});
    spec.terms.push_back({"d_expulsion", cfg.w2, true});
  } else if (cfg.objective_kind == "eq2") {
    spec.kind = ObjectiveKind::CurveMse;
    std::vector<std::string> responses = cfg.eq2_responses;
    if (responses.empty())
      for (const auto& name : canonical_curve_names()) responses.push_back("mse_" + name);
    std::vector<double> weights = cfg.eq2_weights;
    if (weights.empty()) weights.assign(responses.size(), 1.0);
    if (weights.size() != responses.size())
      throw Error("objective: eq2 weights count does not match the response list");
    for (std::size_t i = 0; i < responses.size(); ++i)
      spec.terms.push_back({responses[i], weights[i], false});
  } else if (cfg.objective_kind == "scalar") {
    spec.kind = ObjectiveKind::WeightedScalar;
    spec.terms.push_back({cfg.scalar_response, 1.0, false});
  } else {
    throw Error("unknown objective kind: " + cfg.objective_kind);
  }
  return spec;
}

std::map<std::string, Curve> build_targets(const RunConfig& cfg) {
  if (cfg.objective_kind != "eq2") return {};
  if (!cfg.targets_csv.empty()) return read_curves_csv(cfg.targets_csv);
  if (cfg.evaluator_type == "spine_tdr")
    return generate_targets(cfg.spine.segment, cfg.spine);
  return {};
}

std::shared_ptr<Evaluator> build_evaluator(const RunConfig& cfg) {
  if (cfg.evaluator_type == "bone_surrogate")
    return std::make_shared<BoneSurrogate>(cfg.space, bone_side_from_name(cfg.bone_side), cfg.bone);
  if (cfg.evaluator_type == "spine_tdr")
    return std::make_shared<SpineSegmentEvaluator>(cfg.space, cfg.spine, build_targets(cfg));
  if (cfg.evaluator_type == "benchmark")
    return std::make_shared<BenchmarkEvaluator>(cfg.space, cfg.benchmark_function);
  if (cfg.evaluator_type == "external")
    return std::make_shared<ExternalProcessEvaluator>(cfg.space, cfg.external_command,
                                                      cfg.external_workdir,
                                                      cfg.external_timeout_s);
  throw Error("unknown evaluator type: " + cfg.evaluator_type);
}

std::vector<double> baseline_values(const RunConfig& cfg) {
  if (!cfg.baseline_override.empty()) {
    std::vector<double> values;
    for (const auto& v : cfg.space.variables) {
      if (v.is_dependent()) continue;
      auto it = cfg.baseline_override.find(v.name);
      if (it == cfg.baseline_override.end())
        throw Error("baseline override missing variable: " + v.name);
      values.push_back(it->second);
    }
    return values;
  }
  if (cfg.preset != "custom") return preset_baseline(cfg.space);
  // Custom spaces default to the region center.
  std::vector<double> values;
  const Region full = Region::full(cfg.space);
  for (int i = 0; i < cfg.space.dim(); ++i) values.push_back(full.center[i]);
  return values;
}

fs::path resolve_run_dir(const RunConfig& cfg) {
  fs::path out(cfg.output_dir);
  if (out.is_absolute()) return out;
  if (const char* root = std::getenv("SRSM_OPT_DIR")) return fs::path(root) / out;
  return out;
}

std::unique_ptr<Runner> build_runner(const RunConfig& cfg, const fs::path& run_dir) {
  auto targets = build_targets(cfg);
  return std::make_unique<Runner>(cfg.space, build_evaluator(cfg), build_objective(cfg),
                                  cfg.constraints, cfg.settings, run_dir, baseline_values(cfg),
                                  std::move(targets));
}

std::string template_config(const std::string& problem) {
  RunConfig cfg;
  cfg.settings.optimizer = OptimizerConfig{};
  cfg.settings.seed = 42;
  cfg.settings.parallelism = 4;
  ConstraintSpec sigma{"sigma_max", 0.3, ConstraintDirection::LessEqual, 0.0};
  if (problem == "bone_inferior" || problem == "bone_superior") {
    cfg.description = "Bone-implant interface optimization (" + problem +
                      "): minimizes w1*|d_subsidence| + w2*|d_expulsion| on the lumped interface "
                      "surrogate. Run the doe command first to calibrate w2.";
    cfg.preset = problem;
    cfg.space = make_preset(problem);
    cfg.evaluator_type = "bone_surrogate";
    cfg.bone_side = problem == "bone_inferior" ? "inferior" : "superior";
    cfg.objective_kind = "eq1";
    cfg.w1 = 1.0;
    cfg.w2 = 1.0;
    cfg.constraints = {sigma, {"d_micro", 0.150, ConstraintDirection::LessEqual, 0.0}};
    cfg.settings.samples_per_iteration = 125;
  } else if (problem == "single_articulation" || problem == "dual_articulation") {
    cfg.description = "Motion-preservation zone optimization (" + problem +
                      "): minimizes the summed normalized curve-matching errors of the ligament "
                      "strains and facet force against the intact segment.";
    cfg.preset = problem;
    cfg.space = make_preset(problem);
    cfg.evaluator_type = "spine_tdr";
    cfg.objective_kind = "eq2";
    cfg.constraints = {sigma, {"impingement", 0.0, ConstraintDirection::LessEqual, 0.0}};
    cfg.settings.samples_per_iteration = problem == "single_articulation" ? 30 : 100;
  } else {
    throw Error("unknown template problem: " + problem);
  }
  cfg.output_dir = "runs/" + problem;
  return run_config_to_json(cfg);
}

} // namespace srsm
