#include "srsm/cli.hpp"

#include "srsm/config.hpp"
#include "srsm/persist.hpp"
#include "srsm/rng.hpp"
#include "srsm/sensitivity.hpp"
#include "srsm/util.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace srsm {

std::string improvement_line(double percent) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "improvement %.1f%%", percent);
  return buf;
}

namespace {

void say(const CliOverrides& opt, const std::string& line) {
  if (!opt.quiet) std::printf("%s\n", line.c_str());
}

RunConfig load_with_overrides(const fs::path& config_path, const CliOverrides& opt) {
  RunConfig cfg = load_run_config(config_path);
  if (opt.has_seed) cfg.settings.seed = opt.seed;
  if (opt.parallelism > 0) cfg.settings.parallelism = opt.parallelism;
  return cfg;
}

void print_summary(const RunResult& result, const RunConfig& cfg, const CliOverrides& opt) {
  say(opt, "iterations: " + std::to_string(result.history.size()) +
              ", termination: " + (result.termination_reason.empty() ? std::string("(running)")
                                                                     : result.termination_reason));
  say(opt, "baseline objective: " + format_double(result.baseline.objective));
  say(opt, "best objective: " + format_double(result.best.objective) + " (design id " +
              std::to_string(result.best.point.id) + ", " +
              (result.best.feasible ? "feasible" : "infeasible") + ")");
  say(opt, improvement_line(result.improvement_percent));

  const auto objective = build_objective(cfg);
  for (const auto& term : objective.terms) {
    const auto b = result.baseline.responses.scalars.find(term.response);
    const auto o = result.best.responses.scalars.find(term.response);
    if (b == result.baseline.responses.scalars.end() ||
        o == result.best.responses.scalars.end())
      continue;
    const double bv = term.absolute ? std::abs(b->second) : b->second;
    const double ov = term.absolute ? std::abs(o->second) : o->second;
    const double pct = bv != 0.0 ? (bv - ov) / std::abs(bv) * 100.0 : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-40s %12.6g -> %12.6g  (%+.1f%%)", term.response.c_str(),
                  bv, ov, pct);
    say(opt, buf);
  }
}

void run_sub(const RunConfig& cfg, const fs::path& run_dir, const CliOverrides& opt) {
  fs::create_directories(run_dir);
  write_text_file((run_dir / "config.json").string(), run_config_to_json(cfg));
  auto runner = build_runner(cfg, run_dir);
  if (cfg.objective_kind == "eq2") {
    const auto targets = build_targets(cfg);
    if (!targets.empty()) {
      fs::create_directories(run_dir / "results");
      write_curves_csv((run_dir / "results" / "targets.csv").string(), targets);
    }
  }
  runner->load_state();
  const RunResult result = runner->run();
  print_summary(result, cfg, opt);
}

int run_split_then_combine(const RunConfig& cfg, const fs::path& run_dir,
                           const CliOverrides& opt) {
  // Two independent 17-variable optimizations, then one evaluation of the
  // merged 34-variable interface.
  RunConfig inferior = cfg;
  inferior.mode = "single";
  inferior.preset = "bone_inferior";
  inferior.space = make_preset("bone_inferior");
  for (const auto& [k, v] : cfg.space.preset_constants) inferior.space.preset_constants[k] = v;
  inferior.bone_side = "inferior";
  inferior.baseline_override.clear();

  RunConfig superior = inferior;
  superior.preset = "bone_superior";
  superior.space = make_preset("bone_superior");
  for (const auto& [k, v] : cfg.space.preset_constants) superior.space.preset_constants[k] = v;
  superior.bone_side = "superior";

  say(opt, "[split] optimizing inferior interface");
  fs::create_directories(run_dir / "inferior");
  write_text_file((run_dir / "inferior" / "config.json").string(), run_config_to_json(inferior));
  auto run_inf = build_runner(inferior, run_dir / "inferior");
  run_inf->load_state();
  const RunResult res_inf = run_inf->run();
  print_summary(res_inf, inferior, opt);

  say(opt, "[split] optimizing superior interface");
  fs::create_directories(run_dir / "superior");
  write_text_file((run_dir / "superior" / "config.json").string(), run_config_to_json(superior));
  auto run_sup = build_runner(superior, run_dir / "superior");
  run_sup->load_state();
  const RunResult res_sup = run_sup->run();
  print_summary(res_sup, superior, opt);

  say(opt, "[split] evaluating the combined interface");
  DesignSpace combined = make_preset("bone_combined");
  for (const auto& [k, v] : cfg.space.preset_constants) combined.preset_constants[k] = v;
  BoneSurrogate evaluator(combined, BoneSide::Combined, cfg.bone);
  const auto objective = build_objective(cfg);

  auto evaluate_combined = [&](const std::map<std::string, double>& values) {
    std::vector<double> raw;
    for (const auto& v : combined.variables) {
      if (v.is_dependent()) continue;
      raw.push_back(values.at(v.name));
    }
    DesignPoint p = resolve_dependents(raw, combined);
    const ResponseSet rs = evaluator.evaluate(p);
    if (!rs.ok) throw Error("combined evaluation failed: " + rs.reason);
    return objective.evaluate(rs.scalars);
  };

  std::map<std::string, double> base_values, best_values;
  for (const auto& d : {res_inf.baseline, res_sup.baseline})
    for (const auto& [k, v] : d.point.resolved) base_values[k] = v;
  for (const auto& d : {res_inf.best, res_sup.best})
    for (const auto& [k, v] : d.point.resolved) best_values[k] = v;

  const double f_base = evaluate_combined(base_values);
  const double f_best = evaluate_combined(best_values);
  const double pct = f_base != 0.0 ? (f_base - f_best) / std::abs(f_base) * 100.0 : 0.0;

  std::string summary = "{\n \"baseline_objective\": " + format_double(f_base) +
                        ",\n \"combined_objective\": " + format_double(f_best) +
                        ",\n \"improvement_percent\": " + format_double(pct) + "\n}\n";
  fs::create_directories(run_dir / "results");
  write_text_file((run_dir / "results" / "combined.json").string(), summary);
  say(opt, "combined objective: " + format_double(f_best) + " vs baseline " +
              format_double(f_base));
  say(opt, improvement_line(pct));
  return 0;
}

} // namespace

int cmd_init(const std::string& path, const CliOverrides& opt) {
  try {
    fs::create_directories(path);
    for (const std::string problem :
         {"bone_inferior", "bone_superior", "single_articulation", "dual_articulation"}) {
      const std::string text = template_config(problem);
      parse_run_config(text, problem);  // templates must pass their own validation
      const fs::path file = fs::path(path) / (problem + ".json");
      write_text_file(file.string(), text);
      say(opt, "wrote " + file.string());
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_run(const std::string& config_path, const CliOverrides& opt) {
  try {
    const RunConfig cfg = load_with_overrides(config_path, opt);
    const fs::path run_dir = resolve_run_dir(cfg);
    if (cfg.mode == "split_then_combine") return run_split_then_combine(cfg, run_dir, opt);
    run_sub(cfg, run_dir, opt);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_resume(const std::string& run_dir, const CliOverrides& opt) {
  try {
    const fs::path dir(run_dir);
    RunConfig cfg = load_run_config(dir / "config.json");
    if (opt.parallelism > 0) cfg.settings.parallelism = opt.parallelism;
    auto runner = build_runner(cfg, dir);
    if (!runner->load_state()) throw Error("no resumable state in " + run_dir);
    if (runner->result().finished) {
      say(opt, "run already finished; nothing to do");
      print_summary(runner->result(), cfg, opt);
      return 0;
    }
    const RunResult result = runner->run();
    print_summary(result, cfg, opt);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_doe(const std::string& config_path, int n, const CliOverrides& opt) {
  try {
    const RunConfig cfg = load_with_overrides(config_path, opt);
    if (cfg.objective_kind != "eq1")
      throw Error("doe weight calibration applies to eq1-style objectives");
    auto evaluator = build_evaluator(cfg);
    auto eval_scalars = [&](const DesignPoint& p) -> std::map<std::string, double> {
      const ResponseSet rs = evaluator->evaluate(p);
      return rs.ok ? rs.scalars : std::map<std::string, double>{};
    };
    const auto cal =
        calibrate_weights_doe(eval_scalars, cfg.space, n, substream_seed(cfg.settings.seed, "doe"),
                              cfg.settings.sampler);
    say(opt, "doe designs: " + std::to_string(cal.n_requested) + " (" +
                std::to_string(cal.n_used) + " evaluated)");
    say(opt, "mean |d_subsidence| = " + format_double(cal.mean_abs_subsidence));
    say(opt, "mean |d_expulsion|  = " + format_double(cal.mean_abs_expulsion));
    say(opt, "w1 = " + format_double(cal.w1));
    say(opt, "w2 = " + format_double(cal.w2));

    RunConfig derived = cfg;
    derived.w1 = cal.w1;
    derived.w2 = cal.w2;
    const std::string text = run_config_to_json(derived);
    parse_run_config(text, "derived config");
    fs::path out(config_path);
    out.replace_filename(out.stem().string() + "_calibrated.json");
    write_text_file(out.string(), text);
    say(opt, "wrote " + out.string());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_sobol(const std::string& run_dir, int n_base, const CliOverrides& opt) {
  try {
    const fs::path dir(run_dir);
    const RunConfig cfg = load_run_config(dir / "config.json");
    const auto records = load_iterations(dir);
    if (records.empty()) throw Error("no iteration state in " + run_dir);
    const auto& last = records.back();
    if (last.models.empty()) throw Error("final iteration has no stored metamodels");

    std::vector<std::string> names;
    std::vector<std::vector<double>> discrete_levels;
    for (int i = 0; i < cfg.space.dim(); ++i) {
      const auto& var = cfg.space.sampled(i);
      names.push_back(var.name);
      std::vector<double> levels;
      if (var.kind == VarKind::Discrete)
        for (double level : var.levels)
          levels.push_back((level - last.region.lo(i)) / (2.0 * last.region.half_range[i]));
      discrete_levels.push_back(std::move(levels));
    }

    const auto objective = build_objective(cfg);
    std::vector<SobolResult> results;
    std::vector<double> weights, variances;
    std::string csv = "variable,objective,s_first,s_total\n";
    std::uint64_t index = 0;
    for (const auto& term : objective.terms) {
      auto it = last.models.find(term.response);
      if (it == last.models.end()) continue;
      const RBFModel& model = it->second;
      auto fn = [&model](const std::vector<double>& x) { return predict(model, x); };
      SobolResult res = sobol(fn, names, discrete_levels, n_base,
                              substream_seed(cfg.settings.seed, "sobol", index++), term.response);
      for (const auto& name : names)
        csv += name + "," + term.response + "," + format_double(res.first_order.at(name)) + "," +
               format_double(res.total.at(name)) + "\n";
      weights.push_back(term.weight);
      variances.push_back(res.output_variance);
      results.push_back(std::move(res));
    }
    if (results.empty()) throw Error("no objective response has a stored metamodel");

    fs::create_directories(dir / "results");
    write_text_file((dir / "results" / "sensitivity.csv").string(), csv);

    const auto ranking = aggregate_ranking(results, weights, variances);
    std::string rank_csv = "variable,score\n";
    for (const auto& r : ranking) rank_csv += r.name + "," + format_double(r.score) + "\n";
    write_text_file((dir / "results" / "sobol_ranking.csv").string(), rank_csv);

    say(opt, "aggregate sensitivity ranking (top 5):");
    for (std::size_t i = 0; i < ranking.size() && i < 5; ++i)
      say(opt, "  " + std::to_string(i + 1) + ". " + ranking[i].name + "  " +
                  format_double(ranking[i].score));
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_report(const std::string& run_dir, const CliOverrides& opt) {
  try {
    const fs::path dir(run_dir);
    const RunConfig cfg = load_run_config(dir / "config.json");
    auto state = load_run_state(dir);
    if (!state) throw Error("no run state in " + run_dir);
    const auto records = load_iterations(dir);

    // Integrity: recompute the termination metrics from the persisted
    // designs and compare against both the stored records and history.csv.
    const Region initial = Region::full(cfg.space);
    std::vector<IterationRecord> prefix;
    for (const auto& rec : records) {
      prefix.push_back(rec);
      const auto redo = check_termination(prefix, cfg.settings.termination, initial);
      auto matches = [](double a, double b) {
        if (std::isnan(a) && std::isnan(b)) return true;
        return a == b;
      };
      if (!matches(redo.design_change, rec.termination.design_change) ||
          !matches(redo.objective_change, rec.termination.objective_change)) {
        std::fprintf(stderr, "integrity error: stored termination metrics of iteration %d do not "
                             "match recomputation\n",
                     rec.k);
        return 2;
      }
    }
    const std::string expected_csv = history_csv_content(state->baseline, records, initial);
    const fs::path csv_path = dir / "results" / "history.csv";
    if (!fs::exists(csv_path) || read_text_file(csv_path.string()) != expected_csv) {
      std::fprintf(stderr, "integrity error: history.csv does not match the persisted state\n");
      return 2;
    }

    // Reports derive exclusively from persisted state.
    RunResult result;
    result.baseline = state->baseline;
    result.history = records;
    result.finished = state->finished;
    result.termination_reason = state->termination_reason;
    // Best over baseline, samples and verified designs.
    const EvaluatedDesign* best = &result.baseline;
    auto total_violation = [](const EvaluatedDesign& d) {
      double t = 0.0;
      for (double v : d.violations) t += v;
      return t;
    };
    auto consider = [&](const EvaluatedDesign& d) {
      if (!d.responses.ok) return;
      if (d.feasible != best->feasible) {
        if (d.feasible) best = &d;
        return;
      }
      if (d.feasible ? d.objective < best->objective
                     : total_violation(d) < total_violation(*best))
        best = &d;
    };
    for (const auto& rec : records) {
      for (const auto& s : rec.samples) consider(s);
      consider(rec.verified);
    }
    result.best = *best;
    const double base = result.baseline.objective;
    result.improvement_percent =
        (std::isfinite(base) && base != 0.0) ? (base - result.best.objective) / std::abs(base) * 100.0
                                             : 0.0;

    print_summary(result, cfg, opt);

    const fs::path ranking_path = dir / "results" / "sobol_ranking.csv";
    if (fs::exists(ranking_path)) {
      std::ifstream in(ranking_path);
      std::string line;
      std::getline(in, line);  // header
      say(opt, "sobol top-5:");
      for (int i = 0; i < 5 && std::getline(in, line); ++i) say(opt, "  " + line);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

} // namespace srsm
