#include "srsm/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"srsmopt - sequential response-surface design optimization"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand too

  srsm::CliOverrides opt;
  std::uint64_t seed = 0;
  app.add_flag("--quiet,-q", opt.quiet, "suppress progress output");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--parallelism", opt.parallelism, "override the evaluation parallelism");

  std::string init_path = ".";
  auto* init = app.add_subcommand("init", "write annotated template configs");
  init->add_option("path", init_path, "directory for the templates");

  std::string config_path;
  std::string run_resume_dir;
  auto* run = app.add_subcommand("run", "execute an optimization run");
  auto* run_config = run->add_option("--config,-c", config_path, "run configuration (JSON)");
  run->add_option("--resume", run_resume_dir, "continue a persisted run directory")
      ->excludes(run_config);

  std::string resume_dir;
  auto* resume = app.add_subcommand("resume", "continue a persisted run");
  resume->add_option("run_dir", resume_dir, "run directory")->required();

  std::string doe_config;
  int doe_n = 100;
  auto* doe = app.add_subcommand("doe", "calibrate objective weights from a sampling study");
  doe->add_option("--config,-c", doe_config, "run configuration (JSON)")->required();
  doe->add_option("--n", doe_n, "number of study designs");

  std::string sobol_dir;
  int n_base = 8192;
  auto* sobol = app.add_subcommand("sobol", "global sensitivity of the final metamodels");
  sobol->add_option("run_dir", sobol_dir, "run directory")->required();
  sobol->add_option("--n-base", n_base, "base sample count");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize a persisted run");
  report->add_option("run_dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) {
    opt.has_seed = true;
    opt.seed = seed;
  }

  if (init->parsed()) return srsm::cmd_init(init_path, opt);
  if (run->parsed()) {
    if (!run_resume_dir.empty()) return srsm::cmd_resume(run_resume_dir, opt);
    if (config_path.empty()) {
      std::fprintf(stderr, "error: run needs --config or --resume\n");
      return 1;
    }
    return srsm::cmd_run(config_path, opt);
  }
  if (resume->parsed()) return srsm::cmd_resume(resume_dir, opt);
  if (doe->parsed()) return srsm::cmd_doe(doe_config, doe_n, opt);
  if (sobol->parsed()) return srsm::cmd_sobol(sobol_dir, n_base, opt);
  if (report->parsed()) return srsm::cmd_report(report_dir, opt);
  return 1;
}
