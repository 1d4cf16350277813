#include "iteration.hpp"

#include <cmath>
#include <sstream>

#include "io_util.hpp"
#include "linalg.hpp"

namespace dsm {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::discrepancy: return "discrepancy";
    case StopKind::a_priori: return "a_priori";
    case StopKind::max_iter: return "max_iter";
  }
  return "?";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::discrepancy: return "discrepancy";
    case StopReason::a_priori: return "a_priori";
    case StopReason::max_iter: return "max_iter";
  }
  return "?";
}

Vector init_u0(const MonotoneOperator& op, const Vector& f_delta, double a0) {
  require(std::isfinite(a0) && a0 > 0, ErrorCode::invalid_argument,
          "init_u0: a0 must be positive");
  require(op.dim == f_delta.size(), ErrorCode::dimension_mismatch,
          "init_u0: f_delta dimension does not match operator");
  return Vector::Zero(op.dim);
}

StartDiagnostic init_u0_diagnostic(const MonotoneOperator& op,
                                   const Vector& f_delta, double a0) {
  StartDiagnostic diag;
  const Vector u0 = init_u0(op, f_delta, a0);
  const Vector V0 = solve_regularized(op, a0, f_delta);
  diag.g0 = (u0 - V0).norm();
  diag.bound = (op.apply(u0) - f_delta).norm() / a0;
  diag.ok = diag.g0 <= diag.bound;
  return diag;
}

Vector step(const MonotoneOperator& op, const Vector& u, double a,
            const Vector& f_delta) {
  require(std::isfinite(a) && a > 0, ErrorCode::invalid_argument,
          "step: a must be positive");
  const Vector r = op.apply(u) + a * u - f_delta;
  Matrix M = op.jacobian(u);
  M.diagonal().array() += a;
  return u - reg_solve_shifted(M, r);
}

RunReport run(const MonotoneOperator& op, const Schedule& s,
              const Vector& f_delta, const StoppingRule& rule,
              const RunOptions& opts) {
  validate_schedule(s);
  require(op.dim == f_delta.size(), ErrorCode::dimension_mismatch,
          "run: f_delta dimension does not match operator");
  require(rule.n_cap >= 0, ErrorCode::invalid_argument,
          "run: n_cap must be >= 0");
  if (opts.y)
    require(opts.y->size() == op.dim, ErrorCode::dimension_mismatch,
            "run: y dimension does not match operator");

  RunReport rep;
  double threshold = kNaN;
  Index a_priori_stop = -1;
  if (rule.kind == StopKind::discrepancy) {
    require(std::isfinite(rule.delta) && rule.delta > 0,
            ErrorCode::invalid_argument,
            "run: the discrepancy rule needs the noise level delta");
    require(rule.C1 > 1, ErrorCode::invalid_argument, "run: C1 must be > 1");
    require(rule.gamma > 0 && rule.gamma <= 1, ErrorCode::invalid_argument,
            "run: gamma must be in (0,1]");
    threshold = rule.C1 * std::pow(rule.delta, rule.gamma);
    require(std::isfinite(threshold) && threshold > 0,
            ErrorCode::invalid_argument,
            "run: discrepancy threshold must be positive");
  } else if (rule.kind == StopKind::a_priori) {
    require(std::isfinite(rule.delta) && rule.delta > 0,
            ErrorCode::invalid_argument,
            "run: the a-priori rule needs the noise level delta");
    rep.n0 = a_priori_index(s, rule.delta, s.y_norm_est());
    a_priori_stop = rep.n0 + 1;
  }
  rep.threshold = threshold;

  Vector u = init_u0(op, f_delta, s.at(0));
  Vector V_prev;
  bool have_V = false;

  const double r0 = (op.apply(u) - f_delta).norm();
  int growth_streak = 0;
  bool warned_divergence = false;

  for (Index n = 0;; ++n) {
    const double a_n = s.at(n);
    TraceRow row;
    row.n = n;
    row.a_n = a_n;
    row.residual = (op.apply(u) - f_delta).norm();
    row.step_norm = kNaN;
    row.g_n = kNaN;
    row.v_norm = kNaN;
    row.v_step = kNaN;

    require(std::isfinite(row.residual), ErrorCode::solver_breakdown,
            "run: residual became non-finite at n = " + std::to_string(n) +
                " (iteration diverged)");

    if (row.residual > 10.0 * r0 && n > 0) {
      if (++growth_streak >= 10 && !warned_divergence) {
        rep.warnings.push_back(
            "residual exceeded 10x the initial value for 10 consecutive "
            "steps ending at n = " +
            std::to_string(n) + "; schedule conditions are likely violated");
        warned_divergence = true;
      }
    } else {
      growth_streak = 0;
    }

    if (opts.diagnostics) {
      SolveInfo info;
      Vector V_n =
          solve_regularized(op, a_n, f_delta, have_V ? &V_prev : nullptr,
                            &info);
      row.g_n = (u - V_n).norm();
      row.v_norm = V_n.norm();
      row.v_step = have_V ? (V_n - V_prev).norm() : kNaN;
      row.v_newton_iters = info.newton_iters;
      V_prev = std::move(V_n);
      have_V = true;
    }

    if (opts.keep_iterates) rep.trace.iterates.push_back(u);
    rep.trace.rows.push_back(row);

    bool stop = false;
    StopReason reason = StopReason::max_iter;
    if (rule.kind == StopKind::discrepancy && row.residual <= threshold) {
      stop = true;
      reason = StopReason::discrepancy;
    } else if (rule.kind == StopKind::a_priori && n == a_priori_stop) {
      stop = true;
      reason = StopReason::a_priori;
    }
    if (!stop && n >= rule.n_cap) {
      stop = true;
      reason = StopReason::max_iter;
    }
    if (stop) {
      rep.n_delta = n;
      rep.u_final = u;
      rep.residual_final = row.residual;
      rep.stop_reason = reason;
      break;
    }

    if (n % 100000 == 0 && n > 0)
      log_msg(2, "run: n = " + std::to_string(n) +
                     ", residual = " + fmt17(row.residual));

    Vector u_next = step(op, u, a_n, f_delta);
    rep.trace.rows.back().step_norm = (u_next - u).norm();
    u = std::move(u_next);
  }

  rep.trace.kept_iterates = opts.keep_iterates;
  if (opts.y) rep.error_vs_y = (rep.u_final - *opts.y).norm();
  return rep;
}

namespace {

struct DiagSeries {
  std::vector<double> a, g, v_norm, v_step;  // v_step[n] = ||V_n - V_{n-1}||
};

RecursionCheck recursion_core(const DiagSeries& ds, const Schedule& s,
                              Index n0, double tol) {
  const Index rows = static_cast<Index>(ds.a.size());
  require(rows >= 2, ErrorCode::invalid_argument,
          "check_error_recursion: need at least two diagnostic rows");
  for (Index n = 0; n < rows; ++n)
    require(std::isfinite(ds.g[static_cast<size_t>(n)]),
            ErrorCode::invalid_argument,
            "check_error_recursion: trace lacks diagnostics (g_n missing)");

  RecursionCheck chk;
  if (tol < 0) tol = 1e-8 * (1.0 + ds.g[0]);
  chk.tol = tol;
  const Index up = std::min<Index>(n0 + 1, rows - 1);
  chk.checked_up_to = up;
  chk.v_increment_ok = chk.g_recursion_ok = chk.g_invariant_ok = true;

  for (Index n = 0; n <= up; ++n) {
    const auto i = static_cast<size_t>(n);
    // invariant g_n < a_n / lambda
    if (!(ds.g[i] < ds.a[i] / s.lambda) && chk.g_invariant_ok) {
      chk.g_invariant_ok = false;
      chk.first_fail_invariant = n;
    }
    if (n == up) break;
    const double da = ds.a[i] - ds.a[i + 1];
    const double ratio = da / ds.a[i + 1];
    // increment bound ||V_n - V_{n+1}|| <= ratio * ||V_n|| + tol
    if (std::isfinite(ds.v_step[i + 1])) {
      if (!(ds.v_step[i + 1] <= ratio * ds.v_norm[i] + tol) &&
          chk.v_increment_ok) {
        chk.v_increment_ok = false;
        chk.first_fail_increment = n;
      }
    }
    // recursion bound g_{n+1} <= (c0/a_n) g_n^2 + ratio * c1 + tol
    const double rhs =
        (s.c0 / ds.a[i]) * ds.g[i] * ds.g[i] + ratio * s.c1 + tol;
    if (!(ds.g[i + 1] <= rhs) && chk.g_recursion_ok) {
      chk.g_recursion_ok = false;
      chk.first_fail_recursion = n;
    }
  }
  return chk;
}

}  // namespace

RecursionCheck check_error_recursion(const IterationTrace& trace,
                                     const Schedule& s, Index n0, double tol) {
  DiagSeries ds;
  ds.a.reserve(trace.rows.size());
  for (const auto& row : trace.rows) {
    ds.a.push_back(row.a_n);
    ds.g.push_back(row.g_n);
    ds.v_norm.push_back(row.v_norm);
    ds.v_step.push_back(row.v_step);
  }
  return recursion_core(ds, s, n0, tol);
}

RecursionCheck check_error_recursion(const IterationTrace& trace,
                                     const Schedule& s,
                                     const std::vector<VSequenceRecord>& v,
                                     Index n0, double tol) {
  require(v.size() >= trace.rows.size(), ErrorCode::invalid_argument,
          "check_error_recursion: v records do not cover the trace");
  DiagSeries ds;
  for (size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& row = trace.rows[i];
    require(v[i].n == row.n, ErrorCode::invalid_argument,
            "check_error_recursion: v records are not aligned by n");
    ds.a.push_back(row.a_n);
    ds.g.push_back(row.g_n);
    ds.v_norm.push_back(v[i].g_v);
    ds.v_step.push_back(i == 0 ? kNaN : (v[i].V - v[i - 1].V).norm());
  }
  return recursion_core(ds, s, n0, tol);
}

StudyTable convergence_study(const MonotoneOperator& op, const Vector& y,
                             std::uint64_t seed,
                             const std::vector<double>& deltas,
                             const StudyOptions& opts) {
  require(!deltas.empty(), ErrorCode::invalid_argument,
          "convergence_study: deltas are empty");
  for (size_t i = 1; i < deltas.size(); ++i)
    require(deltas[i] < deltas[i - 1], ErrorCode::invalid_argument,
            "convergence_study: deltas must be strictly decreasing");
  require(opts.gamma > 0 && opts.gamma < 1, ErrorCode::invalid_argument,
          "convergence_study: gamma must lie strictly inside (0,1)");

  StudyTable table;
  table.complete = true;
  for (double delta : deltas) {
    try {
      const MonotoneProblem p = make_problem(op, y, delta, seed);
      AutoScheduleOptions so;
      so.C1 = opts.C1;
      so.gamma = opts.gamma;
      so.y_norm_est = opts.y_norm_est;
      so.R = opts.bounds_R;
      so.samples = opts.bounds_samples;
      const Schedule s = auto_schedule(p.op, p.f_delta, delta, so);

      StoppingRule rule;
      rule.kind = StopKind::discrepancy;
      rule.C1 = opts.C1;
      rule.gamma = opts.gamma;
      rule.delta = delta;
      rule.n_cap = opts.n_cap;
      RunOptions ro;
      ro.y = &y;
      log_msg(1, "study: delta = " + fmt17(delta));
      const RunReport rep = run(p.op, s, p.f_delta, rule, ro);

      StudyRow row;
      row.delta = delta;
      row.n_delta = rep.n_delta;
      row.error = rep.error_vs_y;
      row.residual = rep.residual_final;
      row.seed = seed;
      row.a_n_delta = s.at(rep.n_delta);
      row.delta_over_a = delta / row.a_n_delta;
      row.d0 = s.d0;
      row.lambda = s.lambda;
      row.stop_reason = rep.stop_reason;
      table.rows.push_back(row);
      if (rep.stop_reason != StopReason::discrepancy) {
        table.complete = false;
        table.failure = "run at delta = " + fmt17(delta) +
                        " did not reach the discrepancy threshold "
                        "(stop reason: " +
                        std::string(to_string(rep.stop_reason)) + ")";
        break;
      }
    } catch (const Error& e) {
      table.complete = false;
      table.failure =
          "run at delta = " + fmt17(delta) + " failed: " + e.what();
      break;
    }
  }

  const auto& rows = table.rows;
  if (rows.size() >= 2) {
    table.error_decreasing = true;
    table.n_delta_nondecreasing = true;
    table.ratio_decreasing = true;
    for (size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].error < rows[i - 1].error)) table.error_decreasing = false;
      if (!(rows[i].n_delta >= rows[i - 1].n_delta))
        table.n_delta_nondecreasing = false;
      if (!(rows[i].delta_over_a < rows[i - 1].delta_over_a))
        table.ratio_decreasing = false;
    }
    table.final_over_first_error = rows.back().error / rows.front().error;
  }
  return table;
}

Schedule auto_schedule(const MonotoneOperator& op, const Vector& f_delta,
                       double delta, const AutoScheduleOptions& opts) {
  const double y_est = opts.y_norm_est > 0
                           ? opts.y_norm_est
                           : estimate_y_norm(op, f_delta, delta);
  const double C = (opts.C1 + 1.0) / 2.0;
  const double R =
      opts.R > 0 ? opts.R : y_est * (2.0 + 2.0 / (C - 1.0)) + 1.0;
  const OperatorBounds bounds = estimate_bounds(
      op, Vector::Zero(op.dim), R, opts.samples, opts.bounds_seed);
  const double f0_dist = (op.apply(Vector::Zero(op.dim)) - f_delta).norm();
  return select_constants(bounds, y_est, f0_dist, opts.C1, opts.gamma);
}

std::string trace_csv(const IterationTrace& trace, bool diagnostics) {
  std::ostringstream out;
  out << "n,a_n,residual,step_norm,g_n\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : fmt17(v); };
  for (const auto& r : trace.rows)
    out << r.n << ',' << fmt17(r.a_n) << ',' << fmt17(r.residual) << ','
        << cell(r.step_norm) << ',' << (diagnostics ? cell(r.g_n) : "")
        << '\n';
  return out.str();
}

std::string study_csv(const StudyTable& table) {
  std::ostringstream out;
  out << "delta,n_delta,error,residual,seed\n";
  for (const auto& r : table.rows)
    out << fmt17(r.delta) << ',' << r.n_delta << ',' << fmt17(r.error) << ','
        << fmt17(r.residual) << ',' << r.seed << '\n';
  return out.str();
}

}  // namespace dsm
