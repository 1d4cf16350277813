#include "schedule.hpp"

#include <cmath>

namespace dsm {

double Schedule::at(Index n) const {
  return d0 / std::pow(d + static_cast<double>(n), b);
}

void validate_schedule(const Schedule& s) {
  require(std::isfinite(s.d0) && s.d0 > 0, ErrorCode::invalid_argument,
          "schedule: d0 must be positive");
  require(std::isfinite(s.d) && s.d >= 1, ErrorCode::invalid_argument,
          "schedule: d must be >= 1");
  require(std::isfinite(s.b) && s.b > 0 && s.b <= 1,
          ErrorCode::invalid_argument, "schedule: b must be in (0,1]");
  require(std::isfinite(s.lambda) && s.lambda > 0,
          ErrorCode::invalid_argument, "schedule: lambda must be positive");
  require(std::isfinite(s.c0) && s.c0 >= 0, ErrorCode::invalid_argument,
          "schedule: c0 must be >= 0");
  require(std::isfinite(s.c1) && s.c1 > 0, ErrorCode::invalid_argument,
          "schedule: c1 must be positive");
  require(std::isfinite(s.C1) && s.C1 > 1, ErrorCode::invalid_argument,
          "schedule: C1 must be > 1");
  require(std::abs(s.C - (s.C1 + 1.0) / 2.0) <= 1e-12 * s.C,
          ErrorCode::invalid_argument, "schedule: C must equal (C1+1)/2");
  require(std::isfinite(s.gamma) && s.gamma > 0 && s.gamma <= 1,
          ErrorCode::invalid_argument, "schedule: gamma must be in (0,1]");
}

Schedule select_constants(const OperatorBounds& bounds, double y_norm_est,
                          double f_delta_minus_F0_norm, double C1,
                          double gamma) {
  require(std::isfinite(y_norm_est) && y_norm_est > 0,
          ErrorCode::invalid_argument,
          "select_constants: y_norm_est must be positive");
  require(std::isfinite(f_delta_minus_F0_norm) && f_delta_minus_F0_norm >= 0,
          ErrorCode::invalid_argument,
          "select_constants: ||f_delta - F(0)|| must be >= 0");
  require(std::isfinite(C1) && C1 > 1, ErrorCode::invalid_argument,
          "select_constants: C1 must be > 1");
  require(std::isfinite(gamma) && gamma > 0 && gamma <= 1,
          ErrorCode::invalid_argument,
          "select_constants: gamma must be in (0,1]");
  require(std::isfinite(bounds.M1) && std::isfinite(bounds.M2) &&
              bounds.M1 >= 0 && bounds.M2 >= 0,
          ErrorCode::invalid_argument,
          "select_constants: bounds must be finite and nonnegative");

  // Guard against linear-degenerate estimates where M1 ~ 0.
  const double M1 = std::max(bounds.M1, 1e-30);

  Schedule s;
  s.C1 = C1;
  s.gamma = gamma;
  s.C = (C1 + 1.0) / 2.0;
  s.c0 = bounds.M2 / 2.0;
  s.c1 = y_norm_est * (1.0 + 2.0 / (s.C - 1.0));
  const double kappa = std::max(1.0, 4.0 * s.c0 * y_norm_est / M1);
  // A few ulps of headroom so that M1/lambda <= y survives rounding.
  s.lambda = kappa * (M1 / y_norm_est) *
             (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
  const double safety = 2.0;
  s.d0 = safety * std::max(std::sqrt(s.lambda * f_delta_minus_F0_norm),
                           4.0 * s.c1 * s.lambda);
  s.d = 1.0;
  s.b = 1.0;

  s.prov.M0 = bounds.M0;
  s.prov.M1 = M1;
  s.prov.M2 = bounds.M2;
  s.prov.R = bounds.R;
  s.prov.y_norm_est = y_norm_est;
  s.prov.f_minus_F0_norm = f_delta_minus_F0_norm;
  s.prov.kappa = kappa;
  s.prov.safety = safety;
  s.prov.auto_d0 = true;

  validate_schedule(s);
  return s;
}

namespace {

void scan_min_margin(ConditionRow& row, Index N,
                     const std::function<double(Index)>& margin) {
  row.pass = true;
  for (Index n = 0; n <= N; ++n) {
    const double m = margin(n);
    if (m < row.worst_margin) row.worst_margin = m;
    if (m < 0 && row.pass) {
      row.pass = false;
      row.first_fail_n = n;
    }
  }
}

}  // namespace

ConditionReport check_conditions(const Schedule& s,
                                 double f_delta_minus_F0_norm,
                                 double y_norm_est, Index N) {
  require(N >= 1, ErrorCode::invalid_argument,
          "check_conditions: N must be >= 1");
  validate_schedule(s);

  ConditionReport rep;
  auto a = [&s](Index n) { return s.at(n); };

  rep.rows[0].name = "a_n <= 2 a_{n+1}";
  scan_min_margin(rep.rows[0], N,
                  [&](Index n) { return 2.0 * a(n + 1) - a(n); });

  rep.rows[1].name = "||f_delta - F(0)|| <= a_0^2 / lambda";
  rep.rows[1].pass = true;
  rep.rows[1].worst_margin =
      a(0) * a(0) / s.lambda - f_delta_minus_F0_norm;
  if (rep.rows[1].worst_margin < 0) {
    rep.rows[1].pass = false;
    rep.rows[1].first_fail_n = 0;
  }

  rep.rows[2].name = "M1 / lambda <= ||y||";
  if (std::isfinite(s.prov.M1)) {
    rep.rows[2].pass = true;
    rep.rows[2].worst_margin = y_norm_est - s.prov.M1 / s.lambda;
    if (rep.rows[2].worst_margin < 0) {
      rep.rows[2].pass = false;
      rep.rows[2].first_fail_n = 0;
    }
  } else {
    rep.rows[2].evaluated = false;
    rep.rows[2].pass = true;  // vacuous: no M1 estimate recorded
    rep.rows[2].worst_margin = std::numeric_limits<double>::quiet_NaN();
  }

  rep.rows[3].name = "(a_n - a_{n+1}) / a_{n+1}^2 <= 1/(2 c1 lambda)";
  const double rhs15 = 1.0 / (2.0 * s.c1 * s.lambda);
  scan_min_margin(rep.rows[3], N, [&](Index n) {
    const double an = a(n), an1 = a(n + 1);
    return rhs15 - (an - an1) / (an1 * an1);
  });

  rep.rows[4].name =
      "c0 a_n / lambda^2 + c1 (a_n - a_{n+1})/a_{n+1} <= a_{n+1}/lambda";
  scan_min_margin(rep.rows[4], N, [&](Index n) {
    const double an = a(n), an1 = a(n + 1);
    return an1 / s.lambda -
           (s.c0 * an / (s.lambda * s.lambda) + s.c1 * (an - an1) / an1);
  });

  rep.all_pass = true;
  for (const auto& row : rep.rows)
    if (!row.pass) rep.all_pass = false;
  return rep;
}

Index a_priori_index(const Schedule& s, double delta, double y_norm_est) {
  require(std::isfinite(delta) && delta > 0, ErrorCode::invalid_argument,
          "a_priori_index: delta must be positive");
  require(std::isfinite(y_norm_est) && y_norm_est > 0,
          ErrorCode::invalid_argument,
          "a_priori_index: y_norm_est must be positive");
  validate_schedule(s);

  const double thr = y_norm_est / (s.C - 1.0);
  require(delta / s.at(0) <= thr, ErrorCode::invalid_argument,
          "a_priori_index: delta/a_0 already exceeds ||y||/(C-1); "
          "a_0 is too small for this delta");

  constexpr Index cap = 100000000;  // 1e8
  // P(n) := delta/a(n+1) > thr is monotone in n; find the first true index.
  auto pred = [&](Index n) { return delta / s.at(n + 1) > thr; };
  Index lo = 0, hi = 1;
  while (!pred(hi)) {
    lo = hi;
    hi *= 2;
    require(hi <= cap, ErrorCode::invalid_argument,
            "a_priori_index: n0 exceeds the 1e8 cap (inconsistent inputs)");
  }
  if (pred(lo)) return lo;  // lo == 0 and already true
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (pred(mid) ? hi : lo) = mid;
  }
  require(hi <= cap, ErrorCode::invalid_argument,
          "a_priori_index: n0 exceeds the 1e8 cap (inconsistent inputs)");
  return hi;
}

}  // namespace dsm
