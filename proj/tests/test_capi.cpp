// The C API exercised the way an external consumer would use the shared
// library: opaque handles, status codes, buffers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsm/dsm.h"

namespace {

std::vector<double> sin_profile(int d, double scale) {
  std::vector<double> y(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    y[static_cast<size_t>(i)] = scale * std::sin(M_PI * (i + 0.5) / d);
  return y;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("operator and problem lifecycle") {
  dsm_operator* op = nullptr;
  REQUIRE(dsm_operator_create_linear_fredholm(40, &op) == DSM_OK);
  CHECK(dsm_operator_dim(op) == 40);

  const auto y = sin_profile(40, 0.4);
  std::vector<double> fy(40);
  REQUIRE(dsm_operator_apply(op, y.data(), y.size(), fy.data()) == DSM_OK);

  dsm_problem* p = nullptr;
  REQUIRE(dsm_problem_create(op, y.data(), y.size(), 1e-3, 7, &p) == DSM_OK);
  CHECK(dsm_problem_dim(p) == 40);
  CHECK(dsm_problem_delta(p) == 1e-3);

  std::vector<double> fd(40);
  REQUIRE(dsm_problem_get_f_delta(p, fd.data(), fd.size()) == DSM_OK);
  double dist2 = 0;
  for (int i = 0; i < 40; ++i)
    dist2 += (fd[static_cast<size_t>(i)] - fy[static_cast<size_t>(i)]) *
             (fd[static_cast<size_t>(i)] - fy[static_cast<size_t>(i)]);
  CHECK(std::abs(std::sqrt(dist2) - 1e-3) <= 1e-16);

  int monotone = 0;
  double worst = -1;
  REQUIRE(dsm_operator_verify_monotone(op, 5.0, 100, 1, &monotone, &worst) ==
          DSM_OK);
  CHECK(monotone == 1);
  CHECK(worst >= 0.0);

  dsm_problem_destroy(p);
  dsm_operator_destroy(op);
}

TEST_CASE("status codes and thread-local error messages") {
  dsm_operator* op = nullptr;
  CHECK(dsm_operator_create_linear_fredholm(1, &op) ==
        DSM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(dsm_last_error()).find(">= 2") != std::string::npos);
  CHECK(dsm_operator_create_linear_fredholm(4, nullptr) ==
        DSM_ERR_INVALID_ARGUMENT);

  REQUIRE(dsm_operator_create_linear_fredholm(4, &op) == DSM_OK);
  double buf[3] = {0, 0, 0};
  CHECK(dsm_operator_apply(op, buf, 3, buf) == DSM_ERR_DIMENSION_MISMATCH);
  CHECK(std::string(dsm_status_message(DSM_ERR_DIMENSION_MISMATCH)) ==
        "dimension mismatch");
  dsm_operator_destroy(op);
}

TEST_CASE("problem save/load through the C API") {
  TempDir tmp("dsm_capi_problem");
  dsm_operator* op = nullptr;
  REQUIRE(dsm_operator_create_cubic(12, 0.25, &op) == DSM_OK);
  const auto y = sin_profile(12, 0.5);
  dsm_problem* p = nullptr;
  REQUIRE(dsm_problem_create(op, y.data(), y.size(), 5e-4, 3, &p) == DSM_OK);
  REQUIRE(dsm_problem_save(p, tmp.file("prob.txt").c_str()) == DSM_OK);

  dsm_problem* q = nullptr;
  REQUIRE(dsm_problem_load(tmp.file("prob.txt").c_str(), &q) == DSM_OK);
  CHECK(dsm_problem_dim(q) == 12);
  CHECK(dsm_problem_delta(q) == 5e-4);
  std::vector<double> f1(12), f2(12);
  REQUIRE(dsm_problem_get_f_delta(p, f1.data(), 12) == DSM_OK);
  REQUIRE(dsm_problem_get_f_delta(q, f2.data(), 12) == DSM_OK);
  CHECK(f1 == f2);

  dsm_problem_destroy(q);
  dsm_problem_destroy(p);
  dsm_operator_destroy(op);
}

TEST_CASE("schedule selection, conditions and a-priori index") {
  dsm_operator* op = nullptr;
  REQUIRE(dsm_operator_create_linear_fredholm(40, &op) == DSM_OK);
  const auto y = sin_profile(40, 0.4);
  dsm_problem* p = nullptr;
  REQUIRE(dsm_problem_create(op, y.data(), y.size(), 1e-3, 7, &p) == DSM_OK);

  dsm_schedule* s = nullptr;
  REQUIRE(dsm_schedule_select(p, /*y_norm_est=*/0.0, 2.0, 0.9, 0.0, 0, &s) ==
          DSM_OK);
  double d0 = 0, lambda = 0;
  REQUIRE(dsm_schedule_get(s, "d0", &d0) == DSM_OK);
  REQUIRE(dsm_schedule_get(s, "lambda", &lambda) == DSM_OK);
  CHECK(d0 > 0);
  CHECK(lambda > 0);
  CHECK(dsm_schedule_a(s, 0) == doctest::Approx(d0));
  CHECK(dsm_schedule_a(s, 1) == doctest::Approx(d0 / 2));
  double nope = 0;
  CHECK(dsm_schedule_get(s, "zeta", &nope) == DSM_ERR_INVALID_ARGUMENT);

  int all_pass = 0;
  REQUIRE(dsm_schedule_check_conditions(s, p, 10000, &all_pass) == DSM_OK);
  CHECK(all_pass == 1);

  int64_t n0 = 0;
  REQUIRE(dsm_schedule_a_priori_n0(s, 1e-3, 1.0, &n0) == DSM_OK);
  CHECK(n0 > 0);

  dsm_schedule_destroy(s);
  dsm_problem_destroy(p);
  dsm_operator_destroy(op);
}

TEST_CASE("regularized solve and a full run through the C API") {
  TempDir tmp("dsm_capi_run");
  dsm_operator* op = nullptr;
  REQUIRE(dsm_operator_create_linear_fredholm(50, &op) == DSM_OK);
  const auto y = sin_profile(50, 0.4);
  dsm_problem* p = nullptr;
  REQUIRE(dsm_problem_create(op, y.data(), y.size(), 1e-3, 7, &p) == DSM_OK);

  std::vector<double> v(50);
  REQUIRE(dsm_solve_regularized(p, 0.5, v.data(), v.size()) == DSM_OK);
  CHECK(dsm_solve_regularized(p, 0.5, v.data(), 10) ==
        DSM_ERR_DIMENSION_MISMATCH);

  dsm_schedule* s = nullptr;
  REQUIRE(dsm_schedule_select(p, 0.0, 2.0, 0.9, 0.0, 0, &s) == DSM_OK);

  dsm_run_options opts{};
  opts.rule = DSM_RULE_DISCREPANCY;
  opts.C1 = 2.0;
  opts.gamma = 0.9;
  opts.n_cap = 200000;
  opts.diagnostics = 0;
  dsm_run_report* rep = nullptr;
  REQUIRE(dsm_run(p, s, &opts, &rep) == DSM_OK);
  CHECK(dsm_run_report_stop_reason(rep) == DSM_STOP_DISCREPANCY);
  CHECK(dsm_run_report_n_delta(rep) > 0);
  CHECK(dsm_run_report_residual(rep) <= 2.0 * std::pow(1e-3, 0.9));
  CHECK(std::isfinite(dsm_run_report_error_vs_y(rep)));

  std::vector<double> u(50);
  REQUIRE(dsm_run_report_get_solution(rep, u.data(), u.size()) == DSM_OK);
  REQUIRE(dsm_run_report_write_trace_csv(
              rep, tmp.file("trace.csv").c_str()) == DSM_OK);
  const std::string csv = slurp(tmp.file("trace.csv"));
  CHECK(csv.rfind("n,a_n,residual,step_norm,g_n\n", 0) == 0);

  dsm_run_report_destroy(rep);
  dsm_schedule_destroy(s);
  dsm_problem_destroy(p);
  dsm_operator_destroy(op);
}

TEST_CASE("config-driven experiments and CSV determinism") {
  TempDir tmp("dsm_capi_experiment");
  const std::string cfg_text =
      "problem.catalog = linear_fredholm\n"
      "problem.dim = 40\n"
      "problem.y = sin\n"
      "problem.y_scale = 0.4\n"
      "problem.delta = 1e-3\n"
      "problem.seed = 7\n"
      "schedule.C1 = 2\n"
      "schedule.gamma = 0.9\n"
      "run.rule = discrepancy\n"
      "run.n_cap = 100000\n";

  dsm_config* cfg = nullptr;
  REQUIRE(dsm_config_parse(cfg_text.c_str(), &cfg) == DSM_OK);

  int code = -1;
  REQUIRE(dsm_experiment_run(cfg, tmp.file("out1").c_str(), &code) == DSM_OK);
  CHECK(code == 0);
  CHECK(std::string(dsm_experiment_last_summary()).find("discrepancy") !=
        std::string::npos);
  REQUIRE(dsm_experiment_run(cfg, tmp.file("out2").c_str(), &code) == DSM_OK);

  const std::string t1 = slurp(tmp.file("out1") + "/trace.csv");
  const std::string t2 = slurp(tmp.file("out2") + "/trace.csv");
  CHECK(t1 == t2);  // identical config and seed: byte-identical bodies
  const std::string j1 = slurp(tmp.file("out1") + "/run.json");
  CHECK(j1.find("\"stop_reason\": \"discrepancy\"") != std::string::npos);

  // Seed override changes the draw but not the format.
  REQUIRE(dsm_config_set(cfg, "problem.seed", "8") == DSM_OK);
  REQUIRE(dsm_experiment_run(cfg, tmp.file("out3").c_str(), &code) == DSM_OK);
  const std::string t3 = slurp(tmp.file("out3") + "/trace.csv");
  CHECK(t3 != t1);

  // Round-trip through save.
  REQUIRE(dsm_config_save(cfg, tmp.file("echo.cfg").c_str()) == DSM_OK);
  dsm_config* cfg2 = nullptr;
  REQUIRE(dsm_config_load(tmp.file("echo.cfg").c_str(), &cfg2) == DSM_OK);
  dsm_config_destroy(cfg2);

  CHECK(dsm_config_set(cfg, "schedule.C1", "0.5") == DSM_ERR_PARSE);
  CHECK(std::string(dsm_last_error()).find("schedule.C1") !=
        std::string::npos);

  dsm_config_destroy(cfg);
}

TEST_CASE("verify and study through the C API") {
  TempDir tmp("dsm_capi_vs");
  const std::string cfg_text =
      "problem.catalog = linear_fredholm\n"
      "problem.dim = 40\n"
      "problem.y = sin\n"
      "problem.y_scale = 0.4\n"
      "problem.delta = 1e-2\n"
      "problem.seed = 7\n"
      "schedule.C1 = 2\n"
      "schedule.gamma = 0.9\n"
      "run.n_cap = 200000\n";
  dsm_config* cfg = nullptr;
  REQUIRE(dsm_config_parse(cfg_text.c_str(), &cfg) == DSM_OK);

  int code = -1;
  REQUIRE(dsm_experiment_verify(cfg, tmp.file("vout").c_str(), &code) ==
          DSM_OK);
  CHECK(code == 0);
  const std::string table = slurp(tmp.file("vout") + "/verify.txt");
  CHECK(table.find("FAIL") == std::string::npos);

  REQUIRE(dsm_experiment_study(cfg, "1e-2,1e-3", tmp.file("sout").c_str(),
                               &code) == DSM_OK);
  CHECK(code == 0);
  const std::string study = slurp(tmp.file("sout") + "/study.csv");
  CHECK(study.rfind("delta,n_delta,error,residual,seed\n", 0) == 0);
  // Header plus two data rows.
  CHECK(std::count(study.begin(), study.end(), '\n') == 3);

  CHECK(dsm_experiment_study(cfg, "1e-3,1e-2", tmp.file("sbad").c_str(),
                             &code) == DSM_ERR_INVALID_ARGUMENT);

  dsm_config_destroy(cfg);
}
