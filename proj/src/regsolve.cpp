#include "regsolve.hpp"

#include <cmath>
#include <sstream>

#include "io_util.hpp"
#include "linalg.hpp"

namespace dsm {

Vector solve_regularized(const MonotoneOperator& op, double a,
                         const Vector& f_delta, const Vector* warm_start,
                         SolveInfo* info,
                         const RegularizedSolveOptions& opts) {
  require(std::isfinite(a) && a > 0, ErrorCode::invalid_argument,
          "solve_regularized: a must be positive");
  require(op.dim == f_delta.size(), ErrorCode::dimension_mismatch,
          "solve_regularized: f_delta dimension does not match operator");
  if (warm_start)
    require(warm_start->size() == op.dim, ErrorCode::dimension_mismatch,
            "solve_regularized: warm start dimension mismatch");

  const double tol = opts.tol_abs(f_delta);
  Vector V = warm_start ? *warm_start : Vector::Zero(op.dim);
  Vector r = op.apply(V) + a * V - f_delta;
  double rn = r.norm();

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (rn <= tol) break;
    Matrix M = op.jacobian(V);
    M.diagonal().array() += a;
    const Vector step = reg_solve_shifted(M, -r);

    // Backtracking on the residual norm.
    double t = 1.0;
    Vector V_trial, r_trial;
    double rn_trial = rn;
    bool accepted = false;
    for (int halve = 0; halve <= opts.max_halvings; ++halve) {
      V_trial = V + t * step;
      r_trial = op.apply(V_trial) + a * V_trial - f_delta;
      rn_trial = r_trial.norm();
      if (std::isfinite(rn_trial) && rn_trial < rn) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted)
      fail(ErrorCode::not_converged,
           "solve_regularized: no residual decrease after " +
               std::to_string(opts.max_halvings) +
               " step halvings (monotonicity or differentiability of the "
               "operator is violated)");
    V = std::move(V_trial);
    r = std::move(r_trial);
    rn = rn_trial;
  }
  if (rn > tol)
    fail(ErrorCode::not_converged,
         "solve_regularized: iteration cap " + std::to_string(opts.max_iters) +
             " exceeded (residual " + fmt17(rn) + ", target " + fmt17(tol) +
             ")");
  if (info) {
    info->newton_iters = it;
    info->residual = rn;
  }
  return V;
}

std::vector<VSequenceRecord> v_sequence(const MonotoneOperator& op,
                                        const Schedule& s,
                                        const Vector& f_delta, Index N) {
  require(N >= 1, ErrorCode::invalid_argument, "v_sequence: N must be >= 1");
  std::vector<VSequenceRecord> records;
  records.reserve(static_cast<size_t>(N) + 1);
  const Vector* warm = nullptr;
  for (Index n = 0; n <= N; ++n) {
    VSequenceRecord rec;
    rec.n = n;
    rec.a_n = s.at(n);
    SolveInfo info;
    try {
      rec.V = solve_regularized(op, rec.a_n, f_delta, warm, &info);
    } catch (const Error& e) {
      fail(e.code(), "v_sequence: solve failed at n = " + std::to_string(n) +
                         ": " + e.what());
    }
    rec.h = (op.apply(rec.V) - f_delta).norm();
    rec.g_v = rec.V.norm();
    rec.newton_iters = info.newton_iters;
    records.push_back(std::move(rec));
    warm = &records.back().V;
  }
  return records;
}

Index v_crossing_index(const std::vector<VSequenceRecord>& records, double C,
                       double delta) {
  require(!records.empty(), ErrorCode::invalid_argument,
          "v_crossing_index: records are empty");
  require(C > 1, ErrorCode::invalid_argument, "v_crossing_index: C must be > 1");
  require(delta > 0, ErrorCode::invalid_argument,
          "v_crossing_index: delta must be positive");
  const double thr = C * delta;
  for (const auto& rec : records)
    if (rec.h <= thr) return rec.n;
  fail(ErrorCode::no_crossing,
       "v_crossing_index: no n with h_n <= C*delta within the records "
       "(last h = " +
           fmt17(records.back().h) + ", threshold " + fmt17(thr) +
           "); extend N");
}

VCrossingScan scan_v_crossing(const MonotoneOperator& op, const Schedule& s,
                              const Vector& f_delta, double C, double delta,
                              Index n_cap) {
  require(n_cap >= 1, ErrorCode::invalid_argument,
          "scan_v_crossing: n_cap must be >= 1");
  const double thr = C * delta;
  VCrossingScan scan;
  Vector V;
  const Vector* warm = nullptr;
  for (Index n = 0; n <= n_cap; ++n) {
    V = solve_regularized(op, s.at(n), f_delta, warm);
    warm = &V;
    const double h = (op.apply(V) - f_delta).norm();
    scan.h.push_back(h);
    scan.g_v.push_back(V.norm());
    if (h <= thr) {
      scan.found = true;
      scan.index = n;
      scan.h_at_index = h;
      break;
    }
  }
  return scan;
}

std::vector<double> default_large_shift_grid() {
  return {1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
}

LargeShiftReport check_large_shift_limit(
    const MonotoneOperator& op, const Vector& f_delta,
    const std::vector<double>& a_values) {
  require(!a_values.empty(), ErrorCode::invalid_argument,
          "check_large_shift_limit: a grid is empty");
  for (size_t i = 1; i < a_values.size(); ++i)
    require(a_values[i] > a_values[i - 1], ErrorCode::invalid_argument,
            "check_large_shift_limit: a grid must be increasing");
  require(a_values.back() >= 1e6, ErrorCode::invalid_argument,
          "check_large_shift_limit: largest a must be >= 1e6");

  const double f0_dist = (op.apply(Vector::Zero(op.dim)) - f_delta).norm();
  LargeShiftReport rep;
  rep.bounds_ok = true;
  rep.h_nondecreasing_in_a = true;
  double prev_h = -std::numeric_limits<double>::infinity();
  for (double a : a_values) {
    LargeShiftRow row;
    row.a = a;
    const Vector V = solve_regularized(op, a, f_delta);
    row.v_norm = V.norm();
    row.bound = f0_dist / a;
    row.bound_ok = row.v_norm <= row.bound;
    row.h = (op.apply(V) - f_delta).norm();
    if (!row.bound_ok) rep.bounds_ok = false;
    if (row.h < prev_h) rep.h_nondecreasing_in_a = false;
    prev_h = row.h;
    rep.rows.push_back(row);
  }
  rep.f0_gap = f0_dist > 0
                   ? std::abs(rep.rows.back().h - f0_dist) / f0_dist
                   : std::abs(rep.rows.back().h - f0_dist);
  rep.limit_ok = rep.f0_gap < 1e-3;
  return rep;
}

double estimate_y_norm(const MonotoneOperator& op, const Vector& f_delta,
                       double delta) {
  require(std::isfinite(delta) && delta > 0, ErrorCode::invalid_argument,
          "estimate_y_norm: delta must be positive");
  const double a_trial = 10.0 * delta;
  return solve_regularized(op, a_trial, f_delta).norm();
}

std::string v_records_csv(const std::vector<VSequenceRecord>& records) {
  std::ostringstream out;
  out << "n,a_n,h_n,g_n,newton_iters\n";
  for (const auto& r : records)
    out << r.n << ',' << fmt17(r.a_n) << ',' << fmt17(r.h) << ','
        << fmt17(r.g_v) << ',' << r.newton_iters << '\n';
  return out.str();
}

}  // namespace dsm
