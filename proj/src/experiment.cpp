#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "io_util.hpp"
#include "linalg.hpp"

namespace dsm {

using nlohmann::json;

namespace {

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = {{"catalog", cfg.catalog}, {"dim", cfg.dim},   {"c", cfg.c},
                  {"y", cfg.y_profile},     {"y_scale", cfg.y_scale},
                  {"delta", cfg.delta},     {"seed", cfg.seed}};
  j["schedule"] = {{"d0", cfg.d0_auto ? json("auto") : json(cfg.d0)},
                   {"d", cfg.d},
                   {"b", cfg.b},
                   {"C1", cfg.C1},
                   {"gamma", cfg.gamma},
                   {"y_norm_est", cfg.y_norm_est_auto ? json("auto")
                                                      : json(cfg.y_norm_est)},
                   {"bounds_R", cfg.bounds_R_auto ? json("auto")
                                                  : json(cfg.bounds_R)},
                   {"bounds_samples", cfg.bounds_samples}};
  j["run"] = {{"rule", to_string(cfg.rule)},
              {"n_cap", cfg.n_cap},
              {"diagnostics", cfg.diagnostics}};
  j["output"] = {{"dir", cfg.out_dir},
                 {"formats", std::string(cfg.write_csv ? "csv" : "") +
                                 (cfg.write_csv && cfg.write_json ? "," : "") +
                                 (cfg.write_json ? "json" : "")}};
  return j;
}

json schedule_json(const Schedule& s) {
  json j = {{"d0", s.d0},     {"d", s.d},   {"b", s.b},
            {"lambda", s.lambda}, {"c0", s.c0}, {"c1", s.c1},
            {"C", s.C},       {"C1", s.C1}, {"gamma", s.gamma}};
  json prov;
  auto put = [&prov](const char* k, double v) {
    if (std::isfinite(v)) prov[k] = v;
  };
  put("M0", s.prov.M0);
  put("M1", s.prov.M1);
  put("M2", s.prov.M2);
  put("R", s.prov.R);
  put("y_norm_est", s.prov.y_norm_est);
  put("f_minus_F0_norm", s.prov.f_minus_F0_norm);
  put("kappa", s.prov.kappa);
  put("safety", s.prov.safety);
  prov["auto_d0"] = s.prov.auto_d0;
  j["provenance"] = prov;
  return j;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::io, "cannot create output directory '" + dir + "'");
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// One row of the verification table.
struct CheckRow {
  std::string name;
  bool evaluated = true;
  bool pass = false;
  std::string detail;
};

std::string render_table(const std::vector<CheckRow>& rows) {
  size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream out;
  for (const auto& r : rows) {
    const char* tag = !r.evaluated ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    out << std::left << std::setw(6) << tag << std::setw(static_cast<int>(width) + 2)
        << r.name << r.detail << "\n";
  }
  return out.str();
}

}  // namespace

ExperimentSetup build_setup(const ExperimentConfig& cfg) {
  ExperimentSetup setup;
  MonotoneOperator op = make_catalog_operator(cfg.catalog, cfg.dim, cfg.c);
  Vector y = make_y_profile(cfg.y_profile, cfg.dim, cfg.y_scale);
  setup.problem = make_problem(std::move(op), std::move(y), cfg.delta,
                               cfg.seed);

  AutoScheduleOptions so;
  so.C1 = cfg.C1;
  so.gamma = cfg.gamma;
  so.y_norm_est = cfg.y_norm_est_auto ? 0.0 : cfg.y_norm_est;
  so.R = cfg.bounds_R_auto ? 0.0 : cfg.bounds_R;
  so.samples = cfg.bounds_samples;
  Schedule s =
      auto_schedule(setup.problem.op, setup.problem.f_delta, cfg.delta, so);
  s.d = cfg.d;
  s.b = cfg.b;
  if (!cfg.d0_auto) {
    s.d0 = cfg.d0;
    s.prov.auto_d0 = false;
  }
  validate_schedule(s);
  setup.schedule = s;
  return setup;
}

CommandResult run_experiment(const ExperimentConfig& cfg,
                             const std::string& out_dir) {
  const ExperimentSetup setup = build_setup(cfg);
  const MonotoneProblem& p = setup.problem;
  const Schedule& s = setup.schedule;

  StoppingRule rule;
  rule.kind = cfg.rule;
  rule.C1 = cfg.C1;
  rule.gamma = cfg.gamma;
  rule.delta = cfg.delta;
  rule.n_cap = cfg.n_cap;

  RunOptions ro;
  ro.diagnostics = cfg.diagnostics;
  ro.y = &p.y;

  log_msg(1, "run: catalog " + cfg.catalog + ", dim " +
                 std::to_string(cfg.dim) + ", rule " + to_string(cfg.rule));
  const RunReport rep = run(p.op, s, p.f_delta, rule, ro);

  ensure_dir(out_dir);
  if (cfg.write_csv)
    write_text_file(path_join(out_dir, "trace.csv"),
                    trace_csv(rep.trace, cfg.diagnostics));
  if (cfg.write_json) {
    json j;
    j["command"] = "run";
    j["config"] = config_json(cfg);
    j["schedule"] = schedule_json(s);
    json res;
    res["n_delta"] = rep.n_delta;
    res["stop_reason"] = to_string(rep.stop_reason);
    res["residual"] = rep.residual_final;
    if (std::isfinite(rep.error_vs_y)) res["error_vs_y"] = rep.error_vs_y;
    if (std::isfinite(rep.threshold)) res["threshold"] = rep.threshold;
    if (rep.n0 >= 0) res["n0"] = rep.n0;
    res["warnings"] = rep.warnings;
    res["u_final"] = std::vector<double>(rep.u_final.data(),
                                         rep.u_final.data() + rep.u_final.size());
    j["result"] = res;
    write_text_file(path_join(out_dir, "run.json"), j.dump(2) + "\n");
  }

  CommandResult out;
  std::ostringstream sum;
  sum << "stopped at n = " << rep.n_delta << " (" << to_string(rep.stop_reason)
      << "), residual " << fmt17(rep.residual_final);
  if (std::isfinite(rep.error_vs_y))
    sum << ", error vs y " << fmt17(rep.error_vs_y);
  for (const auto& w : rep.warnings) sum << "\n  warning: " << w;
  out.summary = sum.str();
  out.exit_code = rep.stop_reason == StopReason::max_iter ? 2 : 0;
  return out;
}

CommandResult verify_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  const ExperimentSetup setup = build_setup(cfg);
  const MonotoneProblem& p = setup.problem;
  const Schedule& s = setup.schedule;
  const MonotoneOperator& op = p.op;
  const double y_norm = p.y.norm();
  const double f0_dist =
      (op.apply(Vector::Zero(op.dim)) - p.f_delta).norm();

  std::vector<CheckRow> rows;
  auto add = [&rows](const std::string& name, bool pass,
                     const std::string& detail, bool evaluated = true) {
    rows.push_back({name, evaluated, pass, detail});
  };

  // Monotonicity gate: the remaining checks assume it.
  const double radius = std::max(2.0 * y_norm, 5.0);
  const MonotonicityReport mono = verify_monotone(op, radius, 300, cfg.seed);
  add("operator monotone on sampled pairs", mono.monotone,
      "worst <F(u)-F(v),u-v> = " + fmt17(mono.worst));

  bool crossing_found = false;
  Index crossing = -1;
  if (mono.monotone) {
    // Large-shift limit.
    const LargeShiftReport l1 =
        check_large_shift_limit(op, p.f_delta, default_large_shift_grid());
    add("||V_a|| <= ||f_delta-F(0)||/a on grid", l1.bounds_ok, "");
    add("residual -> ||F(0)-f_delta|| as a grows", l1.limit_ok,
        "relative gap " + fmt17(l1.f0_gap));
    add("residual nondecreasing in a on grid", l1.h_nondecreasing_in_a, "");

    // V-sequence monotonicity and bounds over a fixed prefix.
    const Index N = 60;
    const auto recs = v_sequence(op, s, p.f_delta, N);
    const double slack = 1e-8 * (1.0 + recs.front().h);
    bool h_mono = true, g_mono = true, rem3 = true, rem5 = true, ident = true;
    for (size_t i = 0; i < recs.size(); ++i) {
      if (i > 0 && recs[i].h > recs[i - 1].h + slack) h_mono = false;
      if (i > 0 && recs[i].g_v < recs[i - 1].g_v - slack) g_mono = false;
      if (recs[i].g_v > y_norm + cfg.delta / recs[i].a_n + 1e-8) rem3 = false;
      if (recs[i].h > f0_dist + slack) rem5 = false;
      if (std::abs(recs[i].h - recs[i].a_n * recs[i].g_v) >
          1e-8 * (1.0 + recs[i].h))
        ident = false;
    }
    add("h_n nonincreasing (V sequence)", h_mono, "N = 60");
    add("||V_n|| nondecreasing (V sequence)", g_mono, "N = 60");
    add("||V_n|| <= ||y|| + delta/a_n", rem3, "");
    add("h_n <= ||F(0) - f_delta||", rem5, "");
    add("h_n = a_n ||V_n|| identity", ident, "");
    ensure_dir(out_dir);
    if (cfg.write_csv)
      write_text_file(path_join(out_dir, "vsequence.csv"),
                      v_records_csv(recs));

    // Discrepancy crossing of the V sequence.
    const double C = s.C;
    const bool hyp = f0_dist > C * cfg.delta;
    add("crossing hypothesis ||F(0)-f_delta|| > C delta", hyp,
        fmt17(f0_dist) + " vs " + fmt17(C * cfg.delta));
    if (hyp) {
      const auto scan =
          scan_v_crossing(op, s, p.f_delta, C, cfg.delta, cfg.n_cap);
      crossing_found = scan.found;
      crossing = scan.index;
      add("V-sequence crossing h_n <= C delta", scan.found,
          scan.found ? "at n = " + std::to_string(scan.index)
                     : "not reached within n_cap; extend run.n_cap");
    }

    // Start point inequality and its lambda consequence.
    const StartDiagnostic sd = init_u0_diagnostic(op, p.f_delta, s.at(0));
    add("g_0 <= ||F(0)-f_delta||/a_0", sd.ok,
        fmt17(sd.g0) + " vs " + fmt17(sd.bound));
  }

  // The five schedule conditions; meaningful regardless of monotonicity.
  const ConditionReport cr =
      check_conditions(s, f0_dist, s.y_norm_est(), cfg.conditions_n);
  for (const auto& row : cr.rows) {
    std::string detail = "worst margin " + fmt17(row.worst_margin);
    if (!row.pass)
      detail += ", first fail n = " + std::to_string(row.first_fail_n);
    add("condition " + row.name, row.pass, detail, row.evaluated);
  }

  // g_0 <= a_0/lambda follows when the data-size and start-point bounds hold.
  if (mono.monotone && cr.rows[1].pass) {
    const StartDiagnostic sd = init_u0_diagnostic(op, p.f_delta, s.at(0));
    add("g_0 <= a_0/lambda", sd.g0 <= s.at(0) / s.lambda,
        fmt17(sd.g0) + " vs " + fmt17(s.at(0) / s.lambda));
  }

  // Error-recursion checks need a diagnostics run up to n0+1.
  if (mono.monotone && cfg.diagnostics) {
    const Index n0 = a_priori_index(s, cfg.delta, s.y_norm_est());
    StoppingRule rule;
    rule.kind = StopKind::max_iter;
    rule.n_cap = n0 + 1;
    RunOptions ro;
    ro.diagnostics = true;
    const RunReport rep = run(op, s, p.f_delta, rule, ro);
    const RecursionCheck rc = check_error_recursion(rep.trace, s, n0);
    add("V-increment bound", rc.v_increment_ok,
        "n <= " + std::to_string(rc.checked_up_to));
    add("g-recursion bound", rc.g_recursion_ok,
        rc.g_recursion_ok ? "" : "first fail n = " +
                                     std::to_string(rc.first_fail_recursion));
    add("invariant g_n < a_n/lambda", rc.g_invariant_ok,
        rc.g_invariant_ok ? "" : "first fail n = " +
                                     std::to_string(rc.first_fail_invariant));
  }

  bool all_pass = true;
  for (const auto& r : rows)
    if (r.evaluated && !r.pass) all_pass = false;

  ensure_dir(out_dir);
  const std::string table = render_table(rows);
  write_text_file(path_join(out_dir, "verify.txt"), table);
  if (cfg.write_json) {
    json j;
    j["command"] = "verify";
    j["config"] = config_json(cfg);
    j["schedule"] = schedule_json(s);
    json jr = json::array();
    for (const auto& r : rows)
      jr.push_back({{"name", r.name},
                    {"evaluated", r.evaluated},
                    {"pass", r.pass},
                    {"detail", r.detail}});
    j["checks"] = jr;
    j["all_pass"] = all_pass;
    if (crossing_found) j["v_crossing_index"] = crossing;
    write_text_file(path_join(out_dir, "verify.json"), j.dump(2) + "\n");
  }

  CommandResult out;
  out.summary = table + (all_pass ? "all checks passed"
                                  : "some checks FAILED");
  out.exit_code = all_pass ? 0 : 2;
  return out;
}

CommandResult study_experiment(const ExperimentConfig& cfg,
                               const std::vector<double>& deltas_override,
                               const std::string& out_dir) {
  const std::vector<double>& deltas =
      deltas_override.empty() ? cfg.study_deltas : deltas_override;
  require(!deltas.empty(), ErrorCode::invalid_argument,
          "study: no deltas given (set study.deltas or pass --deltas)");
  for (size_t i = 1; i < deltas.size(); ++i)
    require(deltas[i] < deltas[i - 1], ErrorCode::invalid_argument,
            "study: deltas must be strictly decreasing");
  require(cfg.gamma > 0 && cfg.gamma < 1, ErrorCode::invalid_argument,
          "study: schedule.gamma must lie strictly inside (0,1)");

  MonotoneOperator op = make_catalog_operator(cfg.catalog, cfg.dim, cfg.c);
  const Vector y = make_y_profile(cfg.y_profile, cfg.dim, cfg.y_scale);

  StudyOptions so;
  so.C1 = cfg.C1;
  so.gamma = cfg.gamma;
  so.n_cap = cfg.n_cap;
  so.y_norm_est = cfg.y_norm_est_auto ? 0.0 : cfg.y_norm_est;
  so.bounds_R = cfg.bounds_R_auto ? 0.0 : cfg.bounds_R;
  so.bounds_samples = cfg.bounds_samples;
  const StudyTable table = convergence_study(op, y, cfg.seed, deltas, so);

  ensure_dir(out_dir);
  if (cfg.write_csv)
    write_text_file(path_join(out_dir, "study.csv"), study_csv(table));
  if (cfg.write_json) {
    json j;
    j["command"] = "study";
    j["config"] = config_json(cfg);
    json jr = json::array();
    for (const auto& r : table.rows)
      jr.push_back({{"delta", r.delta},
                    {"n_delta", r.n_delta},
                    {"error", r.error},
                    {"residual", r.residual},
                    {"seed", r.seed},
                    {"a_n_delta", r.a_n_delta},
                    {"delta_over_a", r.delta_over_a},
                    {"d0", r.d0},
                    {"lambda", r.lambda},
                    {"stop_reason", to_string(r.stop_reason)}});
    j["rows"] = jr;
    j["complete"] = table.complete;
    if (!table.complete) j["failure"] = table.failure;
    if (table.rows.size() >= 2) {
      j["verdicts"] = {{"error_decreasing", table.error_decreasing},
                       {"n_delta_nondecreasing", table.n_delta_nondecreasing},
                       {"delta_over_a_decreasing", table.ratio_decreasing},
                       {"final_over_first_error",
                        table.final_over_first_error}};
    }
    write_text_file(path_join(out_dir, "study.json"), j.dump(2) + "\n");
  }

  CommandResult out;
  std::ostringstream sum;
  sum << table.rows.size() << " of " << deltas.size() << " rows completed";
  if (!table.complete) sum << "; aborted: " << table.failure;
  if (table.rows.size() >= 2)
    sum << "; error decreasing: " << (table.error_decreasing ? "yes" : "NO")
        << ", n_delta nondecreasing: "
        << (table.n_delta_nondecreasing ? "yes" : "NO");
  out.summary = sum.str();
  out.exit_code = table.complete ? 0 : 2;
  return out;
}

}  // namespace dsm
