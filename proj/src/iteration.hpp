#pragma once

#include <optional>
#include <string>
#include <vector>

#include "operators.hpp"
#include "regsolve.hpp"
#include "schedule.hpp"
#include "types.hpp"

namespace dsm {

enum class StopKind { discrepancy, a_priori, max_iter };
enum class StopReason { discrepancy, a_priori, max_iter };

const char* to_string(StopKind k);
const char* to_string(StopReason r);

struct StoppingRule {
  StopKind kind = StopKind::discrepancy;
  double C1 = 2.0;
  double gamma = 1.0;
  double delta = 0.0;
  Index n_cap = 1000000;
};

// One row per iterate. The V-diagnostics columns are NaN unless the run was
// made with diagnostics on; step_norm is NaN on the terminal row.
struct TraceRow {
  Index n = 0;
  double a_n = 0.0;
  double residual = 0.0;   // ||F(u_n) - f_delta||
  double step_norm = 0.0;  // ||u_{n+1} - u_n||
  double g_n = 0.0;        // ||u_n - V_n||
  double v_norm = 0.0;     // ||V_n||
  double v_step = 0.0;     // ||V_n - V_{n-1}||, NaN at n = 0
  int v_newton_iters = 0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  // Full iterates, kept only on request (memory grows with n * dim).
  std::vector<Vector> iterates;
  bool kept_iterates = false;
};

struct RunReport {
  Index n_delta = 0;
  Vector u_final;
  double residual_final = 0.0;
  double error_vs_y = std::numeric_limits<double>::quiet_NaN();
  StopReason stop_reason = StopReason::max_iter;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  Index n0 = -1;  // a-priori index when computable, else -1
  IterationTrace trace;
  std::vector<std::string> warnings;
};

struct RunOptions {
  bool diagnostics = false;
  bool keep_iterates = false;
  const Vector* y = nullptr;  // exact solution, for the error column
};

/// Start point u_0 = 0; it satisfies g_0 = ||V_0|| <= ||F(0)-f_delta||/a_0.
Vector init_u0(const MonotoneOperator& op, const Vector& f_delta, double a0);

struct StartDiagnostic {
  double g0 = 0.0;
  double bound = 0.0;  // ||F(0) - f_delta||/a_0
  bool ok = false;
};

/// Computes V_0 and checks the start-point inequality explicitly.
StartDiagnostic init_u0_diagnostic(const MonotoneOperator& op,
                                   const Vector& f_delta, double a0);

/// One step of the scheme: u - (F'(u) + aI)^{-1} [F(u) + a u - f_delta].
/// Exactly one Jacobian evaluation and one linear solve, no damping.
Vector step(const MonotoneOperator& op, const Vector& u, double a,
            const Vector& f_delta);

/// Runs the iteration under the given stopping rule. The discrepancy rule
/// stops at the first n with ||F(u_n) - f_delta|| <= C1 * delta^gamma (a tie
/// counts as crossed); if u_0 already satisfies it the report has
/// n_delta = 0. The a-priori rule stops at n0 + 1. Reaching n_cap is
/// reported as stop_reason = max_iter, not an error.
RunReport run(const MonotoneOperator& op, const Schedule& s,
              const Vector& f_delta, const StoppingRule& rule,
              const RunOptions& opts = {});

// Error-recursion diagnostics over a diagnostics-mode trace, for n up to
// n0+1: the V-increment bound, the g-recursion
// g_{n+1} <= (c0/a_n) g_n^2 + c1 (a_n - a_{n+1})/a_{n+1}, and the
// invariant g_n < a_n/lambda.
struct RecursionCheck {
  bool v_increment_ok = false;
  bool g_recursion_ok = false;
  bool g_invariant_ok = false;
  Index first_fail_increment = -1;
  Index first_fail_recursion = -1;
  Index first_fail_invariant = -1;
  Index checked_up_to = -1;
  double tol = 0.0;
  bool all_ok() const {
    return v_increment_ok && g_recursion_ok && g_invariant_ok;
  }
};

/// tol < 0 selects the default 1e-8 * (1 + g_0).
RecursionCheck check_error_recursion(const IterationTrace& trace,
                                     const Schedule& s, Index n0,
                                     double tol = -1.0);

/// Spec-shaped overload: V-diagnostics taken from explicit records aligned
/// by n instead of the trace columns.
RecursionCheck check_error_recursion(const IterationTrace& trace,
                                     const Schedule& s,
                                     const std::vector<VSequenceRecord>& v,
                                     Index n0, double tol = -1.0);

struct StudyRow {
  double delta = 0.0;
  Index n_delta = 0;
  double error = 0.0;
  double residual = 0.0;
  std::uint64_t seed = 0;
  double a_n_delta = 0.0;
  double delta_over_a = 0.0;
  double d0 = 0.0;
  double lambda = 0.0;
  StopReason stop_reason = StopReason::max_iter;
};

struct StudyTable {
  std::vector<StudyRow> rows;
  bool complete = false;
  std::string failure;  // message for the row that aborted the study
  // Verdicts (meaningful once rows.size() >= 2).
  bool error_decreasing = false;
  bool n_delta_nondecreasing = false;
  bool ratio_decreasing = false;
  double final_over_first_error = std::numeric_limits<double>::quiet_NaN();
};

// Schedule selection from data alone: estimates ||y|| from ||V(10*delta)||
// when not supplied, picks the sampling ball radius from the containment
// bound when not supplied, estimates the operator bounds, and applies the
// constructive constant selection.
struct AutoScheduleOptions {
  double C1 = 2.0;
  double gamma = 1.0;
  double y_norm_est = 0.0;      // <= 0: estimate from data
  double R = 0.0;               // <= 0: y_est*(2 + 2/(C-1)) + 1
  int samples = 160;
  std::uint64_t bounds_seed = 1;
};

Schedule auto_schedule(const MonotoneOperator& op, const Vector& f_delta,
                       double delta, const AutoScheduleOptions& opts);

struct StudyOptions {
  double C1 = 2.0;
  double gamma = 0.9;
  Index n_cap = 10000000;
  // y_norm_est <= 0 requests the data-driven estimate ||V(10*delta)||.
  double y_norm_est = 0.0;
  double bounds_R = 0.0;  // <= 0: auto
  int bounds_samples = 160;
};

/// For each delta (strictly decreasing, gamma in (0,1)): rebuilds f_delta
/// from the same seed, reselects the schedule constants, runs the
/// discrepancy rule, and records the error against the known solution.
/// A failing run aborts the study but keeps the completed rows.
StudyTable convergence_study(const MonotoneOperator& op, const Vector& y,
                             std::uint64_t seed,
                             const std::vector<double>& deltas,
                             const StudyOptions& opts);

std::string trace_csv(const IterationTrace& trace, bool diagnostics);
std::string study_csv(const StudyTable& table);

}  // namespace dsm
