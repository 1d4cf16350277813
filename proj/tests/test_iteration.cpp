#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iteration.hpp"
#include "oracles.hpp"

using dsm::Index;
using dsm::Matrix;
using dsm::Schedule;
using dsm::StopKind;
using dsm::StopReason;
using dsm::Vector;

namespace {

Vector sin_profile(int d, double scale) {
  Vector y(d);
  for (int i = 0; i < d; ++i) y[i] = scale * std::sin(M_PI * (i + 0.5) / d);
  return y;
}

Schedule selected_schedule(const dsm::MonotoneProblem& p, double C1,
                           double gamma, double y_norm) {
  dsm::AutoScheduleOptions so;
  so.C1 = C1;
  so.gamma = gamma;
  so.y_norm_est = y_norm;
  return dsm::auto_schedule(p.op, p.f_delta, p.delta, so);
}

}  // namespace

TEST_CASE("init_u0 returns zero and satisfies the start inequality") {
  const auto op = dsm::catalog_linear_fredholm(30);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.5), 1e-3, 1);
  const Vector u0 = dsm::init_u0(op, p.f_delta, 4.0);
  CHECK(u0.norm() == 0.0);
  CHECK(u0.size() == 30);

  const auto diag = dsm::init_u0_diagnostic(op, p.f_delta, 4.0);
  CHECK(diag.ok);
  CHECK(diag.g0 <= diag.bound);
}

TEST_CASE("start point obeys g0 <= a0/lambda under the data-size bound") {
  const auto op = dsm::catalog_linear_fredholm(30);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.5), 1e-3, 1);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const double f0 = (op.apply(Vector::Zero(30)) - p.f_delta).norm();
  REQUIRE(f0 <= s.at(0) * s.at(0) / s.lambda);  // data-size bound
  const auto diag = dsm::init_u0_diagnostic(op, p.f_delta, s.at(0));
  CHECK(diag.g0 <= s.at(0) / s.lambda);
}

TEST_CASE("one step on an affine operator lands on the regularized solution") {
  const int d = 25;
  const auto op = dsm::catalog_linear_fredholm(d);
  std::mt19937_64 rng(5);
  const Vector f_delta = oracles::gaussian(d, rng);
  const double a = 0.3;

  Matrix M = dsm::fredholm_min_kernel_matrix(d);
  M.diagonal().array() += a;
  const Vector v = oracles::gauss_solve(M, f_delta);

  const Vector from_zero = dsm::step(op, Vector::Zero(d), a, f_delta);
  const Vector from_rand = dsm::step(op, oracles::gaussian(d, rng), a, f_delta);
  CHECK((from_zero - v).norm() <= 1e-11 * v.norm());
  CHECK((from_rand - v).norm() <= 1e-10 * v.norm());
}

TEST_CASE("scalar cubic step hand arithmetic") {
  const auto op = oracles::scalar_cube();
  Vector f(1);
  f << 2.0;
  Vector u(1);
  u << 1.0;  // residual u^3 + u - 2 = 0: fixed point
  CHECK(dsm::step(op, u, 1.0, f)[0] == doctest::Approx(1.0).epsilon(1e-14));
  u << 0.0;  // A = 0 + 1, step = -(0 + 0 - 2)/1 = 2
  CHECK(dsm::step(op, u, 1.0, f)[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("discrepancy run: crossing semantics on the linear catalog") {
  const auto op = dsm::catalog_linear_fredholm(100);
  const auto p = dsm::make_problem(op, sin_profile(100, 0.3), 1e-3, 7);
  const Schedule s = selected_schedule(p, 2.0, 1.0, p.y.norm());

  dsm::StoppingRule rule;
  rule.kind = StopKind::discrepancy;
  rule.C1 = 2.0;
  rule.gamma = 1.0;
  rule.delta = 1e-3;
  rule.n_cap = 200000;
  dsm::RunOptions ro;
  ro.y = &p.y;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);

  CHECK(rep.stop_reason == StopReason::discrepancy);
  CHECK(rep.n_delta > 0);
  const double thr = 2.0 * 1e-3;
  CHECK(rep.residual_final <= thr);
  // Exhaustive scan of the trace: unique first crossing, consecutive rows,
  // a_n matching the schedule.
  for (size_t i = 0; i < rep.trace.rows.size(); ++i) {
    const auto& row = rep.trace.rows[i];
    CHECK(row.n == static_cast<dsm::Index>(i));
    CHECK(row.a_n == s.at(row.n));
    if (row.n < rep.n_delta) CHECK(row.residual > thr);
    if (row.n == rep.n_delta) CHECK(row.residual <= thr);
  }
  CHECK(rep.trace.rows.back().n == rep.n_delta);
  CHECK(std::isfinite(rep.error_vs_y));
}

TEST_CASE("discrepancy satisfied at n = 0 returns u0 immediately") {
  const auto op = dsm::catalog_linear_fredholm(20);
  const auto p = dsm::make_problem(op, sin_profile(20, 0.3), 1e-3, 7);
  const Schedule s = selected_schedule(p, 2.0, 1.0, p.y.norm());
  dsm::StoppingRule rule;
  rule.kind = StopKind::discrepancy;
  rule.C1 = 1e6;  // huge C1: the threshold exceeds ||f_delta|| already
  rule.gamma = 1.0;
  rule.delta = 1e-3;
  const auto rep = dsm::run(op, s, p.f_delta, rule);
  CHECK(rep.n_delta == 0);
  CHECK(rep.stop_reason == StopReason::discrepancy);
  CHECK(rep.u_final.norm() == 0.0);
  CHECK(rep.trace.rows.size() == 1);
}

TEST_CASE("run validates the discrepancy rule inputs") {
  const auto op = dsm::catalog_linear_fredholm(10);
  const auto p = dsm::make_problem(op, sin_profile(10, 0.3), 1e-3, 7);
  const Schedule s = selected_schedule(p, 2.0, 1.0, p.y.norm());
  dsm::StoppingRule rule;
  rule.kind = StopKind::discrepancy;
  rule.delta = 0.0;  // the rule is delta-dependent
  CHECK_THROWS_AS(dsm::run(op, s, p.f_delta, rule), dsm::Error);
  rule.delta = 1e-3;
  rule.C1 = 1.0;
  CHECK_THROWS_AS(dsm::run(op, s, p.f_delta, rule), dsm::Error);
}

TEST_CASE("Newton exactness: DSM iterates equal the V-sequence when linear") {
  const auto op = dsm::catalog_linear_fredholm(60);
  const auto p = dsm::make_problem(op, sin_profile(60, 0.4), 1e-3, 3);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = 41;
  dsm::RunOptions ro;
  ro.keep_iterates = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);
  const auto recs = dsm::v_sequence(op, s, p.f_delta, 40);

  REQUIRE(rep.trace.iterates.size() == 42);
  for (Index n = 0; n <= 40; ++n) {
    const Vector& u_next = rep.trace.iterates[static_cast<size_t>(n + 1)];
    const Vector& v_n = recs[static_cast<size_t>(n)].V;
    CHECK((u_next - v_n).norm() <= 1e-9 * v_n.norm());
  }
}

TEST_CASE("a-priori rule stops exactly at n0 + 1") {
  const auto op = dsm::catalog_linear_fredholm(40);
  const auto p = dsm::make_problem(op, sin_profile(40, 0.4), 1e-2, 3);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::a_priori;
  rule.delta = p.delta;
  rule.n_cap = n0 + 100;
  const auto rep = dsm::run(op, s, p.f_delta, rule);
  CHECK(rep.stop_reason == StopReason::a_priori);
  CHECK(rep.n_delta == n0 + 1);
  CHECK(rep.n0 == n0);
}

TEST_CASE("max_iter cap is a report, not an exception") {
  const auto op = dsm::catalog_linear_fredholm(30);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.4), 1e-4, 3);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  dsm::StoppingRule rule;
  rule.kind = StopKind::discrepancy;
  rule.C1 = 2.0;
  rule.gamma = 0.9;
  rule.delta = 1e-4;
  rule.n_cap = 5;  // far too small to cross
  const auto rep = dsm::run(op, s, p.f_delta, rule);
  CHECK(rep.stop_reason == StopReason::max_iter);
  CHECK(rep.n_delta == 5);
  CHECK(rep.trace.rows.size() == 6);
}

TEST_CASE("stopping index stays within the a-priori budget") {
  const auto op = dsm::catalog_linear_fredholm(80);
  const auto p = dsm::make_problem(op, sin_profile(80, 0.4), 1e-3, 11);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::discrepancy;
  rule.C1 = 2.0;
  rule.gamma = 0.9;
  rule.delta = p.delta;
  rule.n_cap = n0 + 2;
  const auto rep = dsm::run(op, s, p.f_delta, rule);
  CHECK(rep.stop_reason == StopReason::discrepancy);
  CHECK(rep.n_delta <= n0 + 1);
}

TEST_CASE("diagnostics invariant g_n < a_n/lambda up to n0 + 1") {
  // Small linear problem so the full a-priori range stays cheap.
  const auto op = dsm::catalog_linear_fredholm(30);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.4), 1e-2, 13);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = n0 + 1;
  dsm::RunOptions ro;
  ro.diagnostics = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);
  REQUIRE(rep.trace.rows.size() == static_cast<size_t>(n0) + 2);
  for (const auto& row : rep.trace.rows) CHECK(row.g_n < row.a_n / s.lambda);
}

TEST_CASE("ball containment over the a-priori range") {
  const auto op = dsm::catalog_cubic(25, 0.25);
  const auto p = dsm::make_problem(op, sin_profile(25, 0.3), 1e-2, 17);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = n0 + 1;
  dsm::RunOptions ro;
  ro.keep_iterates = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);

  const double ynorm = p.y.norm();
  const double R = s.at(0) / s.lambda + 0.0 + ynorm +
                   ynorm * (s.C + 1.0) / (s.C - 1.0) + 1e-8;
  for (const auto& u : rep.trace.iterates) CHECK(u.norm() <= R);
}

TEST_CASE("error recursion checks on the linear catalog (c0 = 0)") {
  const auto op = dsm::catalog_linear_fredholm(40);
  const auto p = dsm::make_problem(op, sin_profile(40, 0.4), 1e-2, 19);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = n0 + 1;
  dsm::RunOptions ro;
  ro.diagnostics = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);
  REQUIRE(s.c0 <= 1e-6);  // linear: the quadratic term vanishes

  const auto chk = dsm::check_error_recursion(rep.trace, s, n0);
  CHECK(chk.v_increment_ok);
  CHECK(chk.g_recursion_ok);
  CHECK(chk.g_invariant_ok);
  CHECK(chk.checked_up_to == n0 + 1);
}

TEST_CASE("error recursion checks on the cubic catalog") {
  const auto op = dsm::catalog_cubic(50, 0.25);
  const auto p = dsm::make_problem(op, sin_profile(50, 0.3), 1e-2, 23);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const Index n0 = dsm::a_priori_index(s, p.delta, s.y_norm_est());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = n0 + 1;
  dsm::RunOptions ro;
  ro.diagnostics = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);
  const auto chk = dsm::check_error_recursion(rep.trace, s, n0);
  CHECK(chk.v_increment_ok);
  CHECK(chk.g_recursion_ok);
  CHECK(chk.g_invariant_ok);
}

TEST_CASE("V-increment bound holds on records alone") {
  const auto op = dsm::catalog_cubic(30, 0.25);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.3), 1e-3, 29);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());
  const auto recs = dsm::v_sequence(op, s, p.f_delta, 60);
  const double tol = 1e-8 * (1.0 + recs[0].g_v);
  for (size_t i = 0; i + 1 < recs.size(); ++i) {
    const double ratio =
        (recs[i].a_n - recs[i + 1].a_n) / recs[i + 1].a_n;
    CHECK((recs[i].V - recs[i + 1].V).norm() <=
          ratio * recs[i].g_v + tol);
  }
}

TEST_CASE("record-based overload agrees with the trace-based recursion") {
  const auto op = dsm::catalog_linear_fredholm(30);
  const auto p = dsm::make_problem(op, sin_profile(30, 0.4), 1e-2, 31);
  const Schedule s = selected_schedule(p, 2.0, 0.9, p.y.norm());

  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = 50;
  dsm::RunOptions ro;
  ro.diagnostics = true;
  const auto rep = dsm::run(op, s, p.f_delta, rule, ro);
  const auto recs = dsm::v_sequence(op, s, p.f_delta, 50);

  const auto a = dsm::check_error_recursion(rep.trace, s, 49);
  const auto b = dsm::check_error_recursion(rep.trace, s, recs, 49);
  CHECK(a.v_increment_ok == b.v_increment_ok);
  CHECK(a.g_recursion_ok == b.g_recursion_ok);
  CHECK(a.g_invariant_ok == b.g_invariant_ok);
}

TEST_CASE("divergence warning fires on a corrupted Newton direction") {
  dsm::MonotoneOperator bad;
  bad.dim = 1;
  bad.apply = [](const Vector& u) { return u; };
  bad.jacobian = [](const Vector&) {
    Matrix J(1, 1);
    J(0, 0) = -0.6;  // A_n = a_n - 0.6 flips the step direction
    return J;
  };
  Schedule s;
  s.d0 = 0.1;
  s.d = 1.0;
  s.b = 1.0;
  s.lambda = 1.0;
  s.c0 = 0.0;
  s.c1 = 1.0;
  s.C1 = 2.0;
  s.C = 1.5;
  s.gamma = 1.0;
  Vector f(1);
  f << 1.0;
  dsm::StoppingRule rule;
  rule.kind = StopKind::max_iter;
  rule.n_cap = 30;
  const auto rep = dsm::run(bad, s, f, rule);
  CHECK(rep.stop_reason == StopReason::max_iter);
  REQUIRE(!rep.warnings.empty());
  CHECK(rep.warnings[0].find("10x") != std::string::npos);
}

TEST_CASE("convergence study on the linear catalog") {
  const auto op = dsm::catalog_linear_fredholm(50);
  const Vector y = sin_profile(50, 0.4);
  dsm::StudyOptions so;
  so.C1 = 2.0;
  so.gamma = 0.9;
  so.y_norm_est = y.norm();
  const auto table =
      dsm::convergence_study(op, y, 7, {1e-2, 1e-3, 1e-4}, so);

  REQUIRE(table.complete);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.error_decreasing);
  CHECK(table.n_delta_nondecreasing);
  for (size_t i = 1; i < table.rows.size(); ++i)
    CHECK(table.rows[i].delta_over_a < table.rows[i - 1].delta_over_a);

  // Oracle: rebuild the final iterate of each row from the regularized
  // normal equations (A + aI) V = f_delta at the row's pre-stop shift.
  const Matrix A = dsm::fredholm_min_kernel_matrix(50);
  for (const auto& row : table.rows) {
    REQUIRE(row.n_delta >= 1);
    std::mt19937_64 rng(7);
    Vector e = oracles::gaussian(50, rng);
    e /= e.norm();
    const Vector f_delta = A * y + row.delta * e;
    Matrix M = A;
    const double a_prev =
        row.d0 / (1.0 + static_cast<double>(row.n_delta - 1));
    M.diagonal().array() += a_prev;
    const Vector v = oracles::gauss_solve(M, f_delta);
    CHECK(std::abs((v - y).norm() - row.error) <= 1e-6 * (1.0 + row.error));
  }
}

TEST_CASE("study errors are seed-robust within 3x") {
  const auto op = dsm::catalog_linear_fredholm(40);
  const Vector y = sin_profile(40, 0.4);
  dsm::StudyOptions so;
  so.C1 = 2.0;
  so.gamma = 0.9;
  so.y_norm_est = y.norm();
  const auto t1 = dsm::convergence_study(op, y, 1, {1e-3}, so);
  const auto t2 = dsm::convergence_study(op, y, 2, {1e-3}, so);
  REQUIRE(t1.complete);
  REQUIRE(t2.complete);
  const double e1 = t1.rows[0].error, e2 = t2.rows[0].error;
  CHECK(std::max(e1, e2) <= 3.0 * std::min(e1, e2));
}

TEST_CASE("study aborts on budget exhaustion but keeps finished rows") {
  const auto op = dsm::catalog_linear_fredholm(30);
  const Vector y = sin_profile(30, 0.4);
  dsm::StudyOptions so;
  so.C1 = 2.0;
  so.gamma = 0.9;
  so.y_norm_est = y.norm();
  so.n_cap = 2000;  // enough for 1e-2, hopeless for 1e-5
  const auto table = dsm::convergence_study(op, y, 7, {1e-2, 1e-5}, so);
  CHECK_FALSE(table.complete);
  CHECK(table.rows.size() == 2);  // second row recorded with max_iter reason
  CHECK(table.rows[1].stop_reason == StopReason::max_iter);
  CHECK(!table.failure.empty());
}

TEST_CASE("study validates deltas and gamma") {
  const auto op = dsm::catalog_linear_fredholm(10);
  const Vector y = sin_profile(10, 0.4);
  dsm::StudyOptions so;
  CHECK_THROWS_AS(dsm::convergence_study(op, y, 1, {1e-3, 1e-2}, so),
                  dsm::Error);
  so.gamma = 1.0;
  CHECK_THROWS_AS(dsm::convergence_study(op, y, 1, {1e-2, 1e-3}, so),
                  dsm::Error);
}
