#pragma once

#include <cstdint>
#include <string>

namespace srsm {

struct CliOverrides {
  bool has_seed = false;
  std::uint64_t seed = 0;
  int parallelism = -1;  // <= 0: keep config value
  bool quiet = false;
};

/// "improvement 14.6%" formatting shared by run summaries and reports.
std::string improvement_line(double percent);

/// Subcommand entry points. All return a process exit code: 0 on success,
/// 1 for usage/config/runtime errors, 2 for state-integrity failures.
int cmd_init(const std::string& path, const CliOverrides& opt);
int cmd_run(const std::string& config_path, const CliOverrides& opt);
int cmd_resume(const std::string& run_dir, const CliOverrides& opt);
int cmd_doe(const std::string& config_path, int n, const CliOverrides& opt);
int cmd_sobol(const std::string& run_dir, int n_base, const CliOverrides& opt);
int cmd_report(const std::string& run_dir, const CliOverrides& opt);

} // namespace srsm
