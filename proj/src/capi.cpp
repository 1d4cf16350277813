#include "dsm/dsm.h"

#include <cmath>
#include <cstring>
#include <string>

#include "config.hpp"
#include "experiment.hpp"
#include "io_util.hpp"
#include "iteration.hpp"
#include "operators.hpp"
#include "regsolve.hpp"
#include "schedule.hpp"

// Opaque handle definitions wrap the core value types.
struct dsm_operator {
  dsm::MonotoneOperator op;
};
struct dsm_problem {
  dsm::MonotoneProblem p;
};
struct dsm_schedule {
  dsm::Schedule s;
};
struct dsm_run_report {
  dsm::RunReport rep;
  bool diagnostics = false;
};
struct dsm_config {
  dsm::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

dsm_status map_code(dsm::ErrorCode code) {
  using dsm::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return DSM_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return DSM_ERR_DIMENSION_MISMATCH;
    case ErrorCode::solver_breakdown: return DSM_ERR_SOLVER_BREAKDOWN;
    case ErrorCode::no_crossing: return DSM_ERR_NO_CROSSING;
    case ErrorCode::not_converged: return DSM_ERR_NOT_CONVERGED;
    case ErrorCode::io: return DSM_ERR_IO;
    case ErrorCode::parse: return DSM_ERR_PARSE;
  }
  return DSM_ERR_INTERNAL;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
dsm_status guarded(Fn&& fn) {
  try {
    fn();
    return DSM_OK;
  } catch (const dsm::Error& e) {
    set_error(e.what());
    return map_code(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return DSM_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return DSM_ERR_INTERNAL;
  }
}

dsm_status require_c(bool cond, dsm_status status, const char* msg) {
  if (!cond) {
    set_error(msg);
    return status;
  }
  return DSM_OK;
}

#define DSM_CHECK(cond, status, msg)                          \
  do {                                                        \
    dsm_status st_ = require_c((cond), (status), (msg));      \
    if (st_ != DSM_OK) return st_;                            \
  } while (0)

dsm_status copy_out(const dsm::Vector& v, double* out, size_t len,
                    const char* what) {
  DSM_CHECK(out != nullptr, DSM_ERR_INVALID_ARGUMENT, what);
  DSM_CHECK(len == static_cast<size_t>(v.size()), DSM_ERR_DIMENSION_MISMATCH,
            "output buffer length does not match the dimension");
  std::memcpy(out, v.data(), sizeof(double) * len);
  return DSM_OK;
}

}  // namespace

extern "C" {

const char* dsm_status_message(dsm_status status) {
  switch (status) {
    case DSM_OK: return "ok";
    case DSM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DSM_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case DSM_ERR_SOLVER_BREAKDOWN: return "linear solver breakdown";
    case DSM_ERR_NO_CROSSING: return "no discrepancy crossing";
    case DSM_ERR_NOT_CONVERGED: return "inner solver did not converge";
    case DSM_ERR_IO: return "i/o error";
    case DSM_ERR_PARSE: return "parse error";
    case DSM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dsm_last_error(void) { return g_last_error.c_str(); }

const char* dsm_version(void) { return "0.1.0"; }

/* --- operators ---------------------------------------------------------- */

dsm_status dsm_operator_create_linear_fredholm(int32_t dim,
                                               dsm_operator** out) {
  DSM_CHECK(out != nullptr, DSM_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new dsm_operator{dsm::catalog_linear_fredholm(dim)};
  });
}

dsm_status dsm_operator_create_cubic(int32_t dim, double c,
                                     dsm_operator** out) {
  DSM_CHECK(out != nullptr, DSM_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] { *out = new dsm_operator{dsm::catalog_cubic(dim, c)}; });
}

void dsm_operator_destroy(dsm_operator* op) { delete op; }

int32_t dsm_operator_dim(const dsm_operator* op) {
  return op ? op->op.dim : 0;
}

dsm_status dsm_operator_apply(const dsm_operator* op, const double* u,
                              size_t len, double* out) {
  DSM_CHECK(op && u && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  DSM_CHECK(len == static_cast<size_t>(op->op.dim),
            DSM_ERR_DIMENSION_MISMATCH,
            "input length does not match the operator dimension");
  return guarded([&] {
    dsm::Vector v = Eigen::Map<const dsm::Vector>(u, op->op.dim);
    dsm::Vector r = op->op.apply(v);
    std::memcpy(out, r.data(), sizeof(double) * len);
  });
}

dsm_status dsm_operator_verify_monotone(const dsm_operator* op,
                                        double region_radius, int32_t pairs,
                                        uint64_t seed, int* monotone,
                                        double* worst) {
  DSM_CHECK(op && monotone, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto rep = dsm::verify_monotone(op->op, region_radius, pairs, seed);
    *monotone = rep.monotone ? 1 : 0;
    if (worst) *worst = rep.worst;
  });
}

/* --- problems ----------------------------------------------------------- */

dsm_status dsm_problem_create(const dsm_operator* op, const double* y,
                              size_t y_len, double delta, uint64_t seed,
                              dsm_problem** out) {
  DSM_CHECK(op && y && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  DSM_CHECK(y_len == static_cast<size_t>(op->op.dim),
            DSM_ERR_DIMENSION_MISMATCH,
            "y length does not match the operator dimension");
  return guarded([&] {
    dsm::Vector yv = Eigen::Map<const dsm::Vector>(y, op->op.dim);
    *out = new dsm_problem{
        dsm::make_problem(op->op, std::move(yv), delta, seed)};
  });
}

void dsm_problem_destroy(dsm_problem* p) { delete p; }

int32_t dsm_problem_dim(const dsm_problem* p) { return p ? p->p.op.dim : 0; }

double dsm_problem_delta(const dsm_problem* p) {
  return p ? p->p.delta : 0.0;
}

dsm_status dsm_problem_get_f_delta(const dsm_problem* p, double* out,
                                   size_t len) {
  DSM_CHECK(p != nullptr, DSM_ERR_INVALID_ARGUMENT, "problem is NULL");
  return copy_out(p->p.f_delta, out, len, "out is NULL");
}

dsm_status dsm_problem_get_y(const dsm_problem* p, double* out, size_t len) {
  DSM_CHECK(p != nullptr, DSM_ERR_INVALID_ARGUMENT, "problem is NULL");
  return copy_out(p->p.y, out, len, "out is NULL");
}

dsm_status dsm_problem_save(const dsm_problem* p, const char* path) {
  DSM_CHECK(p && path, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { dsm::save_problem(p->p, path); });
}

dsm_status dsm_problem_load(const char* path, dsm_problem** out) {
  DSM_CHECK(path && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new dsm_problem{dsm::load_problem(path)}; });
}

/* --- schedules ---------------------------------------------------------- */

dsm_status dsm_schedule_select(const dsm_problem* p, double y_norm_est,
                               double C1, double gamma, double bounds_R,
                               int32_t bounds_samples, dsm_schedule** out) {
  DSM_CHECK(p && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    dsm::AutoScheduleOptions so;
    so.C1 = C1;
    so.gamma = gamma;
    so.y_norm_est = y_norm_est;
    so.R = bounds_R;
    if (bounds_samples > 0) so.samples = bounds_samples;
    *out = new dsm_schedule{
        dsm::auto_schedule(p->p.op, p->p.f_delta, p->p.delta, so)};
  });
}

dsm_status dsm_schedule_create(double d0, double d, double b, double lambda,
                               double c0, double c1, double C1, double gamma,
                               dsm_schedule** out) {
  DSM_CHECK(out != nullptr, DSM_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    dsm::Schedule s;
    s.d0 = d0;
    s.d = d;
    s.b = b;
    s.lambda = lambda;
    s.c0 = c0;
    s.c1 = c1;
    s.C1 = C1;
    s.C = (C1 + 1.0) / 2.0;
    s.gamma = gamma;
    dsm::validate_schedule(s);
    *out = new dsm_schedule{s};
  });
}

void dsm_schedule_destroy(dsm_schedule* s) { delete s; }

double dsm_schedule_a(const dsm_schedule* s, int64_t n) {
  return s ? s->s.at(n) : std::numeric_limits<double>::quiet_NaN();
}

dsm_status dsm_schedule_get(const dsm_schedule* s, const char* field,
                            double* out) {
  DSM_CHECK(s && field && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  const std::string f = field;
  if (f == "d0") *out = s->s.d0;
  else if (f == "d") *out = s->s.d;
  else if (f == "b") *out = s->s.b;
  else if (f == "lambda") *out = s->s.lambda;
  else if (f == "c0") *out = s->s.c0;
  else if (f == "c1") *out = s->s.c1;
  else if (f == "C") *out = s->s.C;
  else if (f == "C1") *out = s->s.C1;
  else if (f == "gamma") *out = s->s.gamma;
  else {
    set_error("unknown schedule field '" + f + "'");
    return DSM_ERR_INVALID_ARGUMENT;
  }
  return DSM_OK;
}

dsm_status dsm_schedule_check_conditions(const dsm_schedule* s,
                                         const dsm_problem* p, int64_t N,
                                         int* all_pass) {
  DSM_CHECK(s && p && all_pass, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const double f0_dist =
        (p->p.op.apply(dsm::Vector::Zero(p->p.op.dim)) - p->p.f_delta).norm();
    const auto rep =
        dsm::check_conditions(s->s, f0_dist, s->s.y_norm_est(), N);
    *all_pass = rep.all_pass ? 1 : 0;
  });
}

dsm_status dsm_schedule_a_priori_n0(const dsm_schedule* s, double delta,
                                    double y_norm_est, int64_t* n0) {
  DSM_CHECK(s && n0, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *n0 = dsm::a_priori_index(s->s, delta, y_norm_est); });
}

/* --- solves and runs ----------------------------------------------------- */

dsm_status dsm_solve_regularized(const dsm_problem* p, double a,
                                 double* v_out, size_t len) {
  DSM_CHECK(p != nullptr, DSM_ERR_INVALID_ARGUMENT, "problem is NULL");
  return guarded([&] {
    const dsm::Vector V = dsm::solve_regularized(p->p.op, a, p->p.f_delta);
    const dsm_status st = copy_out(V, v_out, len, "v_out is NULL");
    if (st != DSM_OK) throw dsm::Error(dsm::ErrorCode::dimension_mismatch,
                                       dsm_last_error());
  });
}

dsm_status dsm_run(const dsm_problem* p, const dsm_schedule* s,
                   const dsm_run_options* options, dsm_run_report** out) {
  DSM_CHECK(p && s && options && out, DSM_ERR_INVALID_ARGUMENT,
            "NULL argument");
  return guarded([&] {
    dsm::StoppingRule rule;
    switch (options->rule) {
      case DSM_RULE_DISCREPANCY: rule.kind = dsm::StopKind::discrepancy; break;
      case DSM_RULE_A_PRIORI: rule.kind = dsm::StopKind::a_priori; break;
      case DSM_RULE_MAX_ITER: rule.kind = dsm::StopKind::max_iter; break;
      default:
        dsm::fail(dsm::ErrorCode::invalid_argument, "unknown rule kind");
    }
    rule.C1 = options->C1;
    rule.gamma = options->gamma;
    rule.delta = p->p.delta;
    rule.n_cap = options->n_cap;
    dsm::RunOptions ro;
    ro.diagnostics = options->diagnostics != 0;
    ro.y = &p->p.y;
    auto* rep = new dsm_run_report{dsm::run(p->p.op, s->s, p->p.f_delta, rule,
                                            ro),
                                   ro.diagnostics};
    *out = rep;
  });
}

void dsm_run_report_destroy(dsm_run_report* r) { delete r; }

int64_t dsm_run_report_n_delta(const dsm_run_report* r) {
  return r ? r->rep.n_delta : -1;
}

dsm_stop_reason dsm_run_report_stop_reason(const dsm_run_report* r) {
  if (!r) return DSM_STOP_MAX_ITER;
  switch (r->rep.stop_reason) {
    case dsm::StopReason::discrepancy: return DSM_STOP_DISCREPANCY;
    case dsm::StopReason::a_priori: return DSM_STOP_A_PRIORI;
    case dsm::StopReason::max_iter: return DSM_STOP_MAX_ITER;
  }
  return DSM_STOP_MAX_ITER;
}

double dsm_run_report_residual(const dsm_run_report* r) {
  return r ? r->rep.residual_final : std::numeric_limits<double>::quiet_NaN();
}

double dsm_run_report_error_vs_y(const dsm_run_report* r) {
  return r ? r->rep.error_vs_y : std::numeric_limits<double>::quiet_NaN();
}

dsm_status dsm_run_report_get_solution(const dsm_run_report* r, double* out,
                                       size_t len) {
  DSM_CHECK(r != nullptr, DSM_ERR_INVALID_ARGUMENT, "report is NULL");
  return copy_out(r->rep.u_final, out, len, "out is NULL");
}

dsm_status dsm_run_report_write_trace_csv(const dsm_run_report* r,
                                          const char* path) {
  DSM_CHECK(r && path, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    dsm::write_text_file(path, dsm::trace_csv(r->rep.trace, r->diagnostics));
  });
}

/* --- config-driven experiments ------------------------------------------ */

dsm_status dsm_config_load(const char* path, dsm_config** out) {
  DSM_CHECK(path && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new dsm_config{dsm::load_config(path)}; });
}

dsm_status dsm_config_parse(const char* text, dsm_config** out) {
  DSM_CHECK(text && out, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new dsm_config{dsm::parse_config_text(text)}; });
}

void dsm_config_destroy(dsm_config* cfg) { delete cfg; }

dsm_status dsm_config_save(const dsm_config* cfg, const char* path) {
  DSM_CHECK(cfg && path, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    dsm::write_text_file(path, dsm::serialize_config(cfg->cfg));
  });
}

dsm_status dsm_config_set(dsm_config* cfg, const char* key,
                          const char* value) {
  DSM_CHECK(cfg && key && value, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    // Re-parse the serialized config with the key overridden; keeps the
    // validation in one place.
    std::string text = dsm::serialize_config(cfg->cfg);
    text += std::string(key) + " = " + value + "\n";
    cfg->cfg = dsm::parse_config_text(text);
  });
}

namespace {
thread_local std::string g_last_summary;
}

dsm_status dsm_experiment_run(const dsm_config* cfg, const char* out_dir,
                              int* exit_code) {
  DSM_CHECK(cfg && exit_code, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : cfg->cfg.out_dir;
    const auto res = dsm::run_experiment(cfg->cfg, dir);
    g_last_summary = res.summary;
    *exit_code = res.exit_code;
  });
}

dsm_status dsm_experiment_verify(const dsm_config* cfg, const char* out_dir,
                                 int* exit_code) {
  DSM_CHECK(cfg && exit_code, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : cfg->cfg.out_dir;
    const auto res = dsm::verify_experiment(cfg->cfg, dir);
    g_last_summary = res.summary;
    *exit_code = res.exit_code;
  });
}

dsm_status dsm_experiment_study(const dsm_config* cfg, const char* deltas_csv,
                                const char* out_dir, int* exit_code) {
  DSM_CHECK(cfg && exit_code, DSM_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::vector<double> deltas;
    if (deltas_csv && *deltas_csv)
      for (const auto& part : dsm::split(deltas_csv, ','))
        deltas.push_back(dsm::parse_double(part, "deltas"));
    const std::string dir = out_dir ? out_dir : cfg->cfg.out_dir;
    const auto res = dsm::study_experiment(cfg->cfg, deltas, dir);
    g_last_summary = res.summary;
    *exit_code = res.exit_code;
  });
}

const char* dsm_experiment_last_summary(void) {
  return g_last_summary.c_str();
}

} /* extern "C" */
