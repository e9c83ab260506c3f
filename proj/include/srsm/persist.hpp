#pragma once

#include "srsm/problem.hpp"
#include "srsm/srsm.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srsm {

/// Run-level state alongside the per-iteration files; everything a resumed
/// process needs that is not derivable from the iteration records.
struct RunLevelState {
  EvaluatedDesign baseline;
  Region current_region;
  std::vector<double> d_prev;
  long next_id = 0;
  bool finished = false;
  std::string termination_reason;
};

void save_iteration(const std::filesystem::path& run_dir, const IterationRecord& record);
std::vector<IterationRecord> load_iterations(const std::filesystem::path& run_dir);

void save_run_state(const std::filesystem::path& run_dir, const RunLevelState& state);
std::optional<RunLevelState> load_run_state(const std::filesystem::path& run_dir);

/// Running best feasible objective after each iteration (used by the
/// history table and reports).
std::vector<double> best_so_far_series(const EvaluatedDesign& baseline,
                                       const std::vector<IterationRecord>& history);

/// results/history.csv: one row per iteration with the termination metrics.
void write_history_csv(const std::filesystem::path& run_dir, const EvaluatedDesign& baseline,
                       const std::vector<IterationRecord>& history, const Region& initial_region);
std::string history_csv_content(const EvaluatedDesign& baseline,
                                const std::vector<IterationRecord>& history,
                                const Region& initial_region);

void write_best_design_json(const std::filesystem::path& run_dir, const RunResult& result);

/// results/convergence.svg: static plot of objective and region size.
void write_convergence_svg(const std::filesystem::path& run_dir, const EvaluatedDesign& baseline,
                           const std::vector<IterationRecord>& history,
                           const Region& initial_region);

/// Target-curve CSV: first column time in seconds, one column per quantity.
void write_curves_csv(const std::string& path, const std::map<std::string, Curve>& curves);
std::map<std::string, Curve> read_curves_csv(const std::string& path);

/// Exclusive ownership of a run directory. Stale locks from dead processes
/// are taken over; a live owner raises an Error.
class RunLock {
public:
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

private:
  std::filesystem::path path_;
};

} // namespace srsm
