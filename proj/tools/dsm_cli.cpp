// Command-line front end for the dsm shared library. Talks to the core
// exclusively through the C API in dsm/dsm.h.
//
// Exit codes: 0 stopping rule fired / all checks passed / study complete,
//             2 iteration budget exhausted or a verification check failed,
//             1 configuration or runtime error.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "dsm/dsm.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string deltas;
  long long seed_override = -1;
  bool diagnostics = false;
};

int fail_status(dsm_status st) {
  std::fprintf(stderr, "error: %s: %s\n", dsm_status_message(st),
               dsm_last_error());
  return 1;
}

// Loads the config and applies the flag overrides shared by all commands.
int load_with_overrides(const CommonArgs& args, dsm_config** cfg) {
  dsm_status st = dsm_config_load(args.config_path.c_str(), cfg);
  if (st != DSM_OK) return fail_status(st);
  if (args.seed_override >= 0) {
    st = dsm_config_set(*cfg, "problem.seed",
                        std::to_string(args.seed_override).c_str());
    if (st != DSM_OK) return fail_status(st);
  }
  if (args.diagnostics) {
    st = dsm_config_set(*cfg, "run.diagnostics", "true");
    if (st != DSM_OK) return fail_status(st);
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_deltas) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out-dir", args.out_dir,
                  "output directory (overrides output.dir)");
  cmd->add_option("--seed-override", args.seed_override,
                  "replace problem.seed");
  cmd->add_flag("--diagnostics", args.diagnostics,
                "force per-step V diagnostics on");
  if (with_deltas)
    cmd->add_option("--deltas", args.deltas,
                    "comma-separated decreasing noise levels "
                    "(overrides study.deltas)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dsm: regularized Newton-type iteration for ill-posed monotone "
      "operator equations"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, study_args;
  CLI::App* cmd_run =
      app.add_subcommand("run", "run the iteration and write the report");
  add_common(cmd_run, run_args, false);
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "run the verification suite and write the pass/fail table");
  add_common(cmd_verify, verify_args, false);
  CLI::App* cmd_study = app.add_subcommand(
      "study", "run the noise-level convergence study");
  add_common(cmd_study, study_args, true);

  CLI11_PARSE(app, argc, argv);

  dsm_config* cfg = nullptr;
  int exit_code = 1;
  dsm_status st = DSM_OK;

  if (cmd_run->parsed()) {
    if (int rc = load_with_overrides(run_args, &cfg)) return rc;
    st = dsm_experiment_run(
        cfg, run_args.out_dir.empty() ? nullptr : run_args.out_dir.c_str(),
        &exit_code);
  } else if (cmd_verify->parsed()) {
    if (int rc = load_with_overrides(verify_args, &cfg)) return rc;
    st = dsm_experiment_verify(
        cfg,
        verify_args.out_dir.empty() ? nullptr : verify_args.out_dir.c_str(),
        &exit_code);
  } else {
    if (int rc = load_with_overrides(study_args, &cfg)) return rc;
    st = dsm_experiment_study(
        cfg, study_args.deltas.empty() ? nullptr : study_args.deltas.c_str(),
        study_args.out_dir.empty() ? nullptr : study_args.out_dir.c_str(),
        &exit_code);
  }

  if (st != DSM_OK) {
    dsm_config_destroy(cfg);
    return fail_status(st);
  }
  std::printf("%s\n", dsm_experiment_last_summary());
  dsm_config_destroy(cfg);
  return exit_code;
}
