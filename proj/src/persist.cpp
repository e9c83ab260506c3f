#include "srsm/persist.hpp"

#include "srsm/util.hpp"

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace srsm {

namespace {

// NaN round-trips as JSON null (nlohmann dumps non-finite numbers as null).
json num(double v) { return std::isnan(v) ? json() : json(v); }
double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json to_json(const DesignPoint& p) {
  json j;
  j["id"] = p.id;
  j["iteration"] = p.iteration;
  j["values"] = p.values;
  j["resolved"] = p.resolved;
  return j;
}

DesignPoint point_from_json(const json& j) {
  DesignPoint p;
  p.id = j.at("id").get<long>();
  p.iteration = j.at("iteration").get<int>();
  p.values = j.at("values").get<std::vector<double>>();
  p.resolved = j.at("resolved").get<std::map<std::string, double>>();
  return p;
}

json to_json(const Region& r) {
  return json{{"center", r.center}, {"half_range", r.half_range}};
}

Region region_from_json(const json& j) {
  Region r;
  r.center = j.at("center").get<std::vector<double>>();
  r.half_range = j.at("half_range").get<std::vector<double>>();
  return r;
}

// Curves are not persisted: everything the resumed loop needs (the fitting
// inputs) lives in the scalar table.
json to_json(const EvaluatedDesign& d) {
  json j;
  j["point"] = to_json(d.point);
  j["ok"] = d.responses.ok;
  j["reason"] = d.responses.reason;
  j["settling_end"] = d.responses.settling_end;
  j["scalars"] = d.responses.scalars;
  j["objective"] = num(d.objective);
  j["violations"] = d.violations;
  j["feasible"] = d.feasible;
  return j;
}

EvaluatedDesign design_from_json(const json& j) {
  EvaluatedDesign d;
  d.point = point_from_json(j.at("point"));
  d.responses.ok = j.at("ok").get<bool>();
  d.responses.reason = j.at("reason").get<std::string>();
  d.responses.settling_end = j.at("settling_end").get<double>();
  d.responses.scalars = j.at("scalars").get<std::map<std::string, double>>();
  d.objective = num_from(j.at("objective"));
  d.violations = j.at("violations").get<std::vector<double>>();
  d.feasible = j.at("feasible").get<bool>();
  return d;
}

json to_json(const RBFModel& m) {
  json j;
  j["response"] = m.response_name;
  j["centers"] = m.centers;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["linear_tail"] = m.linear_tail;
  j["shape_c"] = m.shape_c;
  j["max_training_residual"] = m.fit_stats.max_training_residual;
  j["loo_rms"] = num(m.fit_stats.loo_rms);
  j["ridge_used"] = m.fit_stats.ridge_used;
  return j;
}

RBFModel model_from_json(const json& j) {
  RBFModel m;
  m.response_name = j.at("response").get<std::string>();
  m.centers = j.at("centers").get<std::vector<std::vector<double>>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.linear_tail = j.at("linear_tail").get<std::vector<double>>();
  m.shape_c = j.at("shape_c").get<double>();
  m.fit_stats.max_training_residual = j.at("max_training_residual").get<double>();
  m.fit_stats.loo_rms = num_from(j.at("loo_rms"));
  m.fit_stats.ridge_used = j.at("ridge_used").get<bool>();
  return m;
}

json to_json(const OptimumReport& o) {
  json j;
  j["point"] = to_json(o.point);
  j["normalized"] = o.normalized;
  j["predicted_objective"] = o.predicted_objective;
  j["scaled_violations"] = o.scaled_violations;
  j["feasible"] = o.feasible;
  j["extrapolated"] = o.extrapolated;
  j["ga_best"] = o.ga_best;
  j["refined_gain"] = o.refined_gain;
  return j;
}

OptimumReport optimum_from_json(const json& j) {
  OptimumReport o;
  o.point = point_from_json(j.at("point"));
  o.normalized = j.at("normalized").get<std::vector<double>>();
  o.predicted_objective = j.at("predicted_objective").get<double>();
  o.scaled_violations = j.at("scaled_violations").get<std::vector<double>>();
  o.feasible = j.at("feasible").get<bool>();
  o.extrapolated = j.at("extrapolated").get<bool>();
  o.ga_best = j.at("ga_best").get<double>();
  o.refined_gain = j.at("refined_gain").get<double>();
  return o;
}

void dump_json(const fs::path& path, const json& j) {
  write_text_file(path.string(), j.dump(1) + "\n");
}

json parse_json_file(const fs::path& path) {
  return json::parse(read_text_file(path.string()));
}

} // namespace

void save_iteration(const fs::path& run_dir, const IterationRecord& r) {
  json j;
  j["k"] = r.k;
  j["region"] = to_json(r.region);
  json samples = json::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  j["samples"] = samples;
  j["sample_ids"] = r.sample_ids;
  j["prior_ids"] = r.prior_ids;
  j["fit_ids"] = r.fit_ids;
  json stats = json::array();
  for (const auto& s : r.model_stats)
    stats.push_back(json{{"response", s.response},
                         {"n_centers", s.n_centers},
                         {"shape_c", s.shape_c},
                         {"max_training_residual", s.max_training_residual},
                         {"loo_rms", num(s.loo_rms)},
                         {"ridge_used", s.ridge_used}});
  j["model_stats"] = stats;
  json models = json::array();
  for (const auto& [name, model] : r.models) models.push_back(to_json(model));
  j["models"] = models;
  j["predicted"] = to_json(r.predicted);
  j["verified"] = to_json(r.verified);
  j["verified_from_sample"] = r.verified_from_sample;
  j["f_k"] = num(r.f_k);
  j["termination"] = json{{"stop", r.termination.stop},
                          {"reason", r.termination.reason},
                          {"design_change", num(r.termination.design_change)},
                          {"objective_change", num(r.termination.objective_change)}};
  j["d_vector"] = r.d_vector;

  fs::create_directories(run_dir / "state");
  dump_json(run_dir / "state" / ("iter_" + std::to_string(r.k) + ".json"), j);
}

std::vector<IterationRecord> load_iterations(const fs::path& run_dir) {
  std::vector<IterationRecord> records;
  for (int k = 1;; ++k) {
    const fs::path path = run_dir / "state" / ("iter_" + std::to_string(k) + ".json");
    if (!fs::exists(path)) break;
    const json j = parse_json_file(path);
    IterationRecord r;
    r.k = j.at("k").get<int>();
    r.region = region_from_json(j.at("region"));
    for (const auto& s : j.at("samples")) r.samples.push_back(design_from_json(s));
    r.sample_ids = j.at("sample_ids").get<std::vector<long>>();
    r.prior_ids = j.at("prior_ids").get<std::vector<long>>();
    r.fit_ids = j.at("fit_ids").get<std::vector<long>>();
    for (const auto& s : j.at("model_stats")) {
      ModelSummary ms;
      ms.response = s.at("response").get<std::string>();
      ms.n_centers = s.at("n_centers").get<int>();
      ms.shape_c = s.at("shape_c").get<double>();
      ms.max_training_residual = s.at("max_training_residual").get<double>();
      ms.loo_rms = num_from(s.at("loo_rms"));
      ms.ridge_used = s.at("ridge_used").get<bool>();
      r.model_stats.push_back(std::move(ms));
    }
    for (const auto& m : j.at("models")) {
      RBFModel model = model_from_json(m);
      r.models[model.response_name] = std::move(model);
    }
    r.predicted = optimum_from_json(j.at("predicted"));
    r.verified = design_from_json(j.at("verified"));
    r.verified_from_sample = j.at("verified_from_sample").get<bool>();
    r.f_k = num_from(j.at("f_k"));
    r.termination.stop = j.at("termination").at("stop").get<bool>();
    r.termination.reason = j.at("termination").at("reason").get<std::string>();
    r.termination.design_change = num_from(j.at("termination").at("design_change"));
    r.termination.objective_change = num_from(j.at("termination").at("objective_change"));
    r.d_vector = j.at("d_vector").get<std::vector<double>>();
    records.push_back(std::move(r));
  }
  return records;
}

void save_run_state(const fs::path& run_dir, const RunLevelState& state) {
  json j;
  j["baseline"] = to_json(state.baseline);
  j["current_region"] = to_json(state.current_region);
  j["d_prev"] = state.d_prev;
  j["next_id"] = state.next_id;
  j["finished"] = state.finished;
  j["termination_reason"] = state.termination_reason;
  fs::create_directories(run_dir / "state");
  dump_json(run_dir / "state" / "run.json", j);
}

std::optional<RunLevelState> load_run_state(const fs::path& run_dir) {
  const fs::path path = run_dir / "state" / "run.json";
  if (!fs::exists(path)) return std::nullopt;
  const json j = parse_json_file(path);
  RunLevelState state;
  state.baseline = design_from_json(j.at("baseline"));
  state.current_region = region_from_json(j.at("current_region"));
  state.d_prev = j.at("d_prev").get<std::vector<double>>();
  state.next_id = j.at("next_id").get<long>();
  state.finished = j.at("finished").get<bool>();
  state.termination_reason = j.at("termination_reason").get<std::string>();
  return state;
}

std::vector<double> best_so_far_series(const EvaluatedDesign& baseline,
                                       const std::vector<IterationRecord>& history) {
  // Running minimum over every feasible evaluated design (baseline, samples,
  // verified optima); falls back to all ok designs while nothing is feasible.
  std::vector<double> series;
  double best_feasible = std::numeric_limits<double>::quiet_NaN();
  double best_any = std::numeric_limits<double>::quiet_NaN();
  auto fold = [&](const EvaluatedDesign& d) {
    if (!d.responses.ok || std::isnan(d.objective)) return;
    if (std::isnan(best_any) || d.objective < best_any) best_any = d.objective;
    if (d.feasible && (std::isnan(best_feasible) || d.objective < best_feasible))
      best_feasible = d.objective;
  };
  fold(baseline);
  for (const auto& r : history) {
    for (const auto& s : r.samples) fold(s);
    fold(r.verified);
    series.push_back(std::isnan(best_feasible) ? best_any : best_feasible);
  }
  return series;
}

std::string history_csv_content(const EvaluatedDesign& baseline,
                                const std::vector<IterationRecord>& history,
                                const Region& initial_region) {
  std::string out = "iteration,f_k,best_so_far,region_volume,design_change,objective_change\n";
  const auto best = best_so_far_series(baseline, history);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& r = history[i];
    out += std::to_string(r.k) + "," + format_double(r.f_k) + "," + format_double(best[i]) + "," +
           format_double(r.region.volume_fraction(initial_region)) + "," +
           format_double(r.termination.design_change) + "," +
           format_double(r.termination.objective_change) + "\n";
  }
  return out;
}

void write_history_csv(const fs::path& run_dir, const EvaluatedDesign& baseline,
                       const std::vector<IterationRecord>& history,
                       const Region& initial_region) {
  fs::create_directories(run_dir / "results");
  write_text_file((run_dir / "results" / "history.csv").string(),
                  history_csv_content(baseline, history, initial_region));
}

void write_best_design_json(const fs::path& run_dir, const RunResult& result) {
  json j;
  j["id"] = result.best.point.id;
  j["iteration"] = result.best.point.iteration;
  j["values"] = result.best.point.resolved;
  j["objective"] = num(result.best.objective);
  j["feasible"] = result.best.feasible;
  j["violations"] = result.best.violations;
  j["scalars"] = result.best.responses.scalars;
  j["baseline_objective"] = num(result.baseline.objective);
  j["improvement_percent"] = result.improvement_percent;
  j["termination_reason"] = result.termination_reason;
  fs::create_directories(run_dir / "results");
  dump_json(run_dir / "results" / "best_design.json", j);
}

namespace {

std::string svg_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         double x0, double y0, double w, double h, double ymin, double ymax,
                         const std::string& color) {
  std::string pts;
  const double xspan = xs.size() > 1 ? xs.back() - xs.front() : 1.0;
  const double yspan = ymax - ymin == 0.0 ? 1.0 : ymax - ymin;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = x0 + (xs[i] - xs.front()) / xspan * w;
    const double py = y0 + h - (ys[i] - ymin) / yspan * h;
    pts += format_double(px) + "," + format_double(py) + " ";
  }
  return "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts +
         "\"/>\n";
}

} // namespace

void write_convergence_svg(const fs::path& run_dir, const EvaluatedDesign& baseline,
                           const std::vector<IterationRecord>& history,
                           const Region& initial_region) {
  const double W = 640, H = 400, margin = 50;
  std::string body;
  body += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 "
          "640 400\">\n";
  body += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  body += "<rect x=\"50\" y=\"50\" width=\"540\" height=\"300\" fill=\"none\" stroke=\"#999\"/>\n";

  if (!history.empty()) {
    std::vector<double> xs, f, vol;
    const std::vector<double> best = best_so_far_series(baseline, history);
    for (const auto& r : history) {
      xs.push_back(r.k);
      f.push_back(r.f_k);
      vol.push_back(r.region.volume_fraction(initial_region));
    }
    double ymin = f.front(), ymax = f.front();
    for (double v : f) {
      if (!std::isnan(v)) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
    if (ymin == ymax) {
      ymin -= 1.0;
      ymax += 1.0;
    }
    body += svg_polyline(xs, f, margin, margin, W - 2 * margin, H - 2 * margin, ymin, ymax,
                         "#1f77b4");
    body += svg_polyline(xs, best, margin, margin, W - 2 * margin, H - 2 * margin, ymin, ymax,
                         "#2ca02c");
    body += svg_polyline(xs, vol, margin, margin, W - 2 * margin, H - 2 * margin, 0.0, 1.0,
                         "#d62728");
    body += "<text x=\"55\" y=\"40\" font-size=\"12\">objective per iteration (blue), best so far "
            "(green), region volume fraction 0..1 (red)</text>\n";
    body += "<text x=\"290\" y=\"380\" font-size=\"12\">iteration</text>\n";
    body += "<text x=\"55\" y=\"365\" font-size=\"11\">f range [" + format_double(ymin) + ", " +
            format_double(ymax) + "]</text>\n";
  }
  body += "</svg>\n";
  fs::create_directories(run_dir / "results");
  write_text_file((run_dir / "results" / "convergence.svg").string(), body);
}

void write_curves_csv(const std::string& path, const std::map<std::string, Curve>& curves) {
  if (curves.empty()) throw Error("write_curves_csv: no curves");
  const double dt = curves.begin()->second.dt;
  std::size_t n = 0;
  for (const auto& [name, c] : curves) {
    if (c.dt != dt) throw Error("write_curves_csv: mixed sampling intervals");
    n = std::max(n, c.values.size());
  }
  std::string out = "time";
  for (const auto& [name, c] : curves) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += format_double(dt * static_cast<double>(i));
    for (const auto& [name, c] : curves)
      out += "," + format_double(i < c.values.size() ? c.values[i] : c.values.back());
    out += "\n";
  }
  write_text_file(path, out);
}

std::map<std::string, Curve> read_curves_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("empty curve csv: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "time")
    throw Error("curve csv must start with a time column: " + path);

  std::vector<std::vector<double>> columns(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw Error("ragged curve csv row in " + path);
    for (std::size_t i = 0; i < fields.size(); ++i) columns[i].push_back(std::stod(fields[i]));
  }
  if (columns[0].size() < 2) throw Error("curve csv needs at least two rows: " + path);
  const double dt = columns[0][1] - columns[0][0];
  for (std::size_t i = 1; i < columns[0].size(); ++i)
    if (std::abs(columns[0][i] - columns[0][i - 1] - dt) > 1e-9)
      throw Error("curve csv time column must be uniform: " + path);

  std::map<std::string, Curve> curves;
  for (std::size_t c = 1; c < header.size(); ++c) {
    Curve curve;
    curve.dt = dt;
    curve.quantity = header[c];
    curve.units = header[c].rfind("force", 0) == 0 ? "N" : "strain";
    curve.values = columns[c];
    curves[header[c]] = std::move(curve);
  }
  return curves;
}

RunLock::RunLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
  fs::create_directories(run_dir);
  if (fs::exists(path_)) {
    long pid = -1;
    try {
      pid = std::stol(read_text_file(path_.string()));
    } catch (...) {
    }
    const bool alive = pid > 0 && pid != static_cast<long>(getpid()) &&
                       fs::exists("/proc/" + std::to_string(pid));
    if (alive)
      throw Error("run directory is locked by pid " + std::to_string(pid) + ": " +
                  run_dir.string());
  }
  write_text_file(path_.string(), std::to_string(getpid()) + "\n");
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

} // namespace srsm
