#pragma once

#include <string>

#include "config.hpp"
#include "iteration.hpp"
#include "types.hpp"

namespace dsm {

// Problem plus the schedule actually used, as assembled from a config.
struct ExperimentSetup {
  MonotoneProblem problem;
  Schedule schedule;
};

ExperimentSetup build_setup(const ExperimentConfig& cfg);

struct CommandResult {
  int exit_code = 0;       // 0 stopped by rule, 2 budget exhausted / checks failed
  std::string summary;     // one-paragraph human text, also printed by the CLI
};

/// Runs the iteration per the config and writes run.json / trace.csv into
/// out_dir. Exit code 0 when the stopping rule fired, 2 on max_iter.
CommandResult run_experiment(const ExperimentConfig& cfg,
                             const std::string& out_dir);

/// Runs the verification suite (operator monotonicity, large-shift limit,
/// V-sequence monotonicity and bounds, residual identity, discrepancy
/// crossing, schedule conditions, start-point inequality, and, with
/// diagnostics on, the error-recursion checks). Writes verify.json and
/// verify.txt. Exit code 0 iff every evaluated check passes, else 2.
CommandResult verify_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir);

/// Runs the delta-sweep convergence study and writes study.csv /
/// study.json. deltas_override (when nonempty) replaces study.deltas.
CommandResult study_experiment(const ExperimentConfig& cfg,
                               const std::vector<double>& deltas_override,
                               const std::string& out_dir);

}  // namespace dsm
