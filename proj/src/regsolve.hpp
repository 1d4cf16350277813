#pragma once

#include <optional>
#include <vector>

#include "operators.hpp"
#include "schedule.hpp"
#include "types.hpp"

namespace dsm {

struct SolveInfo {
  int newton_iters = 0;
  double residual = 0.0;
};

struct RegularizedSolveOptions {
  // Absolute residual target ||F(V) + aV - f_delta|| <= tol_abs(f_delta),
  // one order below the tightest verification-check slack.
  double tol_factor = 1e-11;
  int max_iters = 200;
  int max_halvings = 60;

  double tol_abs(const Vector& f_delta) const {
    return tol_factor * (1.0 + f_delta.norm());
  }
};

/// Solves F(V) + a V = f_delta by damped Newton with backtracking. The
/// linearized systems (F'(V) + aI) s = -r are uniformly invertible for a
/// monotone operator. Starts from warm_start when given, else from 0.
Vector solve_regularized(const MonotoneOperator& op, double a,
                         const Vector& f_delta,
                         const Vector* warm_start = nullptr,
                         SolveInfo* info = nullptr,
                         const RegularizedSolveOptions& opts = {});

// One step of the regularized-solution sequence: V_n solves
// F(V_n) + a_n V_n = f_delta, with h_n = ||F(V_n) - f_delta|| = a_n ||V_n||.
struct VSequenceRecord {
  Index n = 0;
  double a_n = 0.0;
  Vector V;
  double h = 0.0;    // residual ||F(V_n) - f_delta||
  double g_v = 0.0;  // ||V_n||
  int newton_iters = 0;
};

/// Computes V_n for n = 0..N, warm-starting each solve from V_{n-1}.
std::vector<VSequenceRecord> v_sequence(const MonotoneOperator& op,
                                        const Schedule& s,
                                        const Vector& f_delta, Index N);

/// First index with h_n <= C*delta; the crossing is unique because h_n is
/// nonincreasing. Throws (no_crossing) when the records never cross,
/// signalling the caller to extend N.
Index v_crossing_index(const std::vector<VSequenceRecord>& records, double C,
                       double delta);

// Streaming variant for large crossings: scalar diagnostics only.
struct VCrossingScan {
  bool found = false;
  Index index = -1;
  double h_at_index = 0.0;
  std::vector<double> h;    // h_0 .. h_last computed
  std::vector<double> g_v;  // matching ||V_n||
};

VCrossingScan scan_v_crossing(const MonotoneOperator& op, const Schedule& s,
                              const Vector& f_delta, double C, double delta,
                              Index n_cap);

// Large-shift behaviour: ||V_a|| <= ||f_delta - F(0)||/a on each grid point
// and ||F(V_a) - f_delta|| -> ||F(0) - f_delta|| as a grows.
struct LargeShiftRow {
  double a = 0.0;
  double v_norm = 0.0;
  double bound = 0.0;  // ||f_delta - F(0)||/a
  bool bound_ok = false;
  double h = 0.0;  // ||F(V_a) - f_delta||
};

struct LargeShiftReport {
  std::vector<LargeShiftRow> rows;
  double f0_gap = 0.0;  // relative gap at the largest a
  bool limit_ok = false;
  bool bounds_ok = false;
  bool h_nondecreasing_in_a = false;
  bool all_ok() const { return limit_ok && bounds_ok && h_nondecreasing_in_a; }
};

/// Default grid {1, 10, ..., 1e6}; a_values must be increasing with
/// max >= 1e6.
LargeShiftReport check_large_shift_limit(const MonotoneOperator& op,
                                         const Vector& f_delta,
                                         const std::vector<double>& a_values);

std::vector<double> default_large_shift_grid();

/// Data-driven lower estimate of ||y||: ||V(a)|| at the trial shift
/// a = 10*delta, where ||V|| <= ||y|| + delta/a keeps the overshoot small.
double estimate_y_norm(const MonotoneOperator& op, const Vector& f_delta,
                       double delta);

/// CSV export (columns: n, a_n, h_n, g_n, newton_iters).
std::string v_records_csv(const std::vector<VSequenceRecord>& records);

}  // namespace dsm
