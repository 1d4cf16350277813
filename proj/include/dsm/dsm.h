/* dsm: stable solution of ill-posed nonlinear equations F(u) = f with
 * monotone operators from noisy data, by a regularized Newton-type
 * iteration with a decaying regularization schedule and discrepancy-based
 * stopping.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a
 * dsm_status, with a thread-local message available from dsm_last_error().
 * Output parameters are written only on DSM_OK.
 */
#ifndef DSM_H
#define DSM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define DSM_API __declspec(dllexport)
#else
#  define DSM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsm_status {
  DSM_OK = 0,
  DSM_ERR_INVALID_ARGUMENT = 1,
  DSM_ERR_DIMENSION_MISMATCH = 2,
  DSM_ERR_SOLVER_BREAKDOWN = 3,
  DSM_ERR_NO_CROSSING = 4,
  DSM_ERR_NOT_CONVERGED = 5,
  DSM_ERR_IO = 6,
  DSM_ERR_PARSE = 7,
  DSM_ERR_INTERNAL = 8
} dsm_status;

typedef enum dsm_rule_kind {
  DSM_RULE_DISCREPANCY = 0,
  DSM_RULE_A_PRIORI = 1,
  DSM_RULE_MAX_ITER = 2
} dsm_rule_kind;

typedef enum dsm_stop_reason {
  DSM_STOP_DISCREPANCY = 0,
  DSM_STOP_A_PRIORI = 1,
  DSM_STOP_MAX_ITER = 2
} dsm_stop_reason;

DSM_API const char* dsm_status_message(dsm_status status);
/* Message of the most recent failure on this thread; empty string if none. */
DSM_API const char* dsm_last_error(void);
DSM_API const char* dsm_version(void);

typedef struct dsm_operator dsm_operator;
typedef struct dsm_problem dsm_problem;
typedef struct dsm_schedule dsm_schedule;
typedef struct dsm_run_report dsm_run_report;
typedef struct dsm_config dsm_config;

/* --- operators ---------------------------------------------------------- */

/* F(u) = A u with A the midpoint collocation matrix of the min(x,t) kernel
 * on [0,1]; symmetric positive definite and increasingly ill-conditioned
 * with dim. Requires dim >= 2. */
DSM_API dsm_status dsm_operator_create_linear_fredholm(int32_t dim,
                                                       dsm_operator** out);
/* F(u) = A u + c * u^3 (componentwise), monotone for c >= 0; dim >= 1. */
DSM_API dsm_status dsm_operator_create_cubic(int32_t dim, double c,
                                             dsm_operator** out);
DSM_API void dsm_operator_destroy(dsm_operator* op);
DSM_API int32_t dsm_operator_dim(const dsm_operator* op);
DSM_API dsm_status dsm_operator_apply(const dsm_operator* op, const double* u,
                                      size_t len, double* out);
/* Sampled monotonicity check; writes 1/0 to *monotone and the worst sampled
 * value of <F(u)-F(v), u-v> to *worst. */
DSM_API dsm_status dsm_operator_verify_monotone(const dsm_operator* op,
                                                double region_radius,
                                                int32_t pairs, uint64_t seed,
                                                int* monotone, double* worst);

/* --- problems ----------------------------------------------------------- */

/* Builds exact data f = F(y) and noisy data f_delta = f + delta * e with a
 * seeded unit direction e, so ||f_delta - f|| = delta exactly. The operator
 * is copied; the caller keeps ownership of op. */
DSM_API dsm_status dsm_problem_create(const dsm_operator* op, const double* y,
                                      size_t y_len, double delta,
                                      uint64_t seed, dsm_problem** out);
DSM_API void dsm_problem_destroy(dsm_problem* p);
DSM_API int32_t dsm_problem_dim(const dsm_problem* p);
DSM_API double dsm_problem_delta(const dsm_problem* p);
DSM_API dsm_status dsm_problem_get_f_delta(const dsm_problem* p, double* out,
                                           size_t len);
DSM_API dsm_status dsm_problem_get_y(const dsm_problem* p, double* out,
                                     size_t len);
/* Problem files hold dimension, catalog id, parameters, y, delta and seed;
 * loading reconstructs the operator and replays the noise draw. */
DSM_API dsm_status dsm_problem_save(const dsm_problem* p, const char* path);
DSM_API dsm_status dsm_problem_load(const char* path, dsm_problem** out);

/* --- schedules ---------------------------------------------------------- */

/* Constructive selection of lambda, c0, c1 and d0 from sampled operator
 * bounds. y_norm_est <= 0 requests the data-driven estimate; bounds_R <= 0
 * picks the containment-based sampling radius; bounds_samples <= 0 uses the
 * default. */
DSM_API dsm_status dsm_schedule_select(const dsm_problem* p,
                                       double y_norm_est, double C1,
                                       double gamma, double bounds_R,
                                       int32_t bounds_samples,
                                       dsm_schedule** out);
/* Fully explicit schedule a_n = d0/(d+n)^b with given constants. */
DSM_API dsm_status dsm_schedule_create(double d0, double d, double b,
                                       double lambda, double c0, double c1,
                                       double C1, double gamma,
                                       dsm_schedule** out);
DSM_API void dsm_schedule_destroy(dsm_schedule* s);
DSM_API double dsm_schedule_a(const dsm_schedule* s, int64_t n);
/* field is one of: d0, d, b, lambda, c0, c1, C, C1, gamma. */
DSM_API dsm_status dsm_schedule_get(const dsm_schedule* s, const char* field,
                                    double* out);
/* Evaluates the five schedule conditions for n = 0..N; *all_pass gets 1/0. */
DSM_API dsm_status dsm_schedule_check_conditions(const dsm_schedule* s,
                                                 const dsm_problem* p,
                                                 int64_t N, int* all_pass);
/* The a-priori stopping index n0 for the given noise level. */
DSM_API dsm_status dsm_schedule_a_priori_n0(const dsm_schedule* s,
                                            double delta, double y_norm_est,
                                            int64_t* n0);

/* --- solves and runs ----------------------------------------------------- */

/* Solves the regularized equation F(V) + a V = f_delta; v_out has problem
 * dimension. */
DSM_API dsm_status dsm_solve_regularized(const dsm_problem* p, double a,
                                         double* v_out, size_t len);

/* The noise level for the discrepancy and a-priori rules is taken from the
 * problem handle. */
typedef struct dsm_run_options {
  dsm_rule_kind rule;
  double C1;
  double gamma;
  int64_t n_cap;
  int diagnostics; /* also record g_n = ||u_n - V_n|| per step */
} dsm_run_options;

DSM_API dsm_status dsm_run(const dsm_problem* p, const dsm_schedule* s,
                           const dsm_run_options* options,
                           dsm_run_report** out);
DSM_API void dsm_run_report_destroy(dsm_run_report* r);
DSM_API int64_t dsm_run_report_n_delta(const dsm_run_report* r);
DSM_API dsm_stop_reason dsm_run_report_stop_reason(const dsm_run_report* r);
DSM_API double dsm_run_report_residual(const dsm_run_report* r);
/* ||u_final - y||; NaN when the problem has no reference solution. */
DSM_API double dsm_run_report_error_vs_y(const dsm_run_report* r);
DSM_API dsm_status dsm_run_report_get_solution(const dsm_run_report* r,
                                               double* out, size_t len);
DSM_API dsm_status dsm_run_report_write_trace_csv(const dsm_run_report* r,
                                                  const char* path);

/* --- config-driven experiments ------------------------------------------ */

DSM_API dsm_status dsm_config_load(const char* path, dsm_config** out);
DSM_API dsm_status dsm_config_parse(const char* text, dsm_config** out);
DSM_API void dsm_config_destroy(dsm_config* cfg);
DSM_API dsm_status dsm_config_save(const dsm_config* cfg, const char* path);
/* Override a single "key = value" pair after loading. */
DSM_API dsm_status dsm_config_set(dsm_config* cfg, const char* key,
                                  const char* value);

/* The three experiment commands. Artifacts are written into out_dir (NULL
 * uses the config's output.dir). *exit_code follows the CLI convention:
 * 0 when the stopping rule fired / all checks passed / the study completed,
 * 2 when the iteration budget ran out or a check failed. Hard failures are
 * reported through the returned status instead. */
DSM_API dsm_status dsm_experiment_run(const dsm_config* cfg,
                                      const char* out_dir, int* exit_code);
DSM_API dsm_status dsm_experiment_verify(const dsm_config* cfg,
                                         const char* out_dir, int* exit_code);
/* deltas_csv: comma-separated decreasing noise levels; NULL uses the
 * config's study.deltas. */
DSM_API dsm_status dsm_experiment_study(const dsm_config* cfg,
                                        const char* deltas_csv,
                                        const char* out_dir, int* exit_code);
/* Human-readable summary of the most recent experiment call on this
 * thread (verification table, stopping summary, or study verdicts). */
DSM_API const char* dsm_experiment_last_summary(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DSM_H */
