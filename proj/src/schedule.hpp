#pragma once

#include <array>
#include <limits>
#include <string>

#include "operators.hpp"
#include "types.hpp"

namespace dsm {

// How the constants of a schedule were obtained; carried for serialization
// and for the M1-dependent condition check.
struct ScheduleProvenance {
  double M0 = std::numeric_limits<double>::quiet_NaN();
  double M1 = std::numeric_limits<double>::quiet_NaN();
  double M2 = std::numeric_limits<double>::quiet_NaN();
  double R = std::numeric_limits<double>::quiet_NaN();
  double y_norm_est = std::numeric_limits<double>::quiet_NaN();
  double f_minus_F0_norm = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double safety = std::numeric_limits<double>::quiet_NaN();
  bool auto_d0 = false;
};

// Regularization sequence a_n = d0/(d+n)^b together with the damping
// constant lambda and the recursion constants c0 = M2/2,
// c1 = ||y||(1 + 2/(C-1)), C = (C1+1)/2.
struct Schedule {
  double d0 = 1.0;
  double d = 1.0;
  double b = 1.0;
  double lambda = 1.0;
  double c0 = 0.0;
  double c1 = 1.0;
  double C = 1.5;
  double C1 = 2.0;
  double gamma = 1.0;
  ScheduleProvenance prov;

  double at(Index n) const;
  // ||y|| estimate recovered from c1 = y(1 + 2/(C-1)).
  double y_norm_est() const { return c1 / (1.0 + 2.0 / (C - 1.0)); }
};

/// Validates field ranges and the coupling C = (C1+1)/2.
void validate_schedule(const Schedule& s);

/// Constructive constant selection: c0 = M2/2, C = (C1+1)/2,
/// c1 = y(1+2/(C-1)), lambda = kappa*M1/y with kappa = max(1, 4*c0*y/M1),
/// d0 = 2 * max(sqrt(lambda*||f_delta - F(0)||), 4*c1*lambda), d = 1, b = 1.
/// The factor 2 on d0 is a safety margin on top of the existence thresholds.
Schedule select_constants(const OperatorBounds& bounds, double y_norm_est,
                          double f_delta_minus_F0_norm, double C1,
                          double gamma);

struct ConditionRow {
  std::string name;
  bool evaluated = true;
  bool pass = false;
  Index first_fail_n = -1;
  // Smallest slack of the inequality over the scanned range; >= 0 iff pass.
  double worst_margin = std::numeric_limits<double>::infinity();
};

struct ConditionReport {
  std::array<ConditionRow, 5> rows;  // the five schedule conditions, in order
  bool all_pass = false;
};

/// Evaluates the five schedule conditions for n = 0..N. Failures are data,
/// not errors. The M1-dependent condition uses the schedule's provenance and
/// is reported as not evaluated when no M1 estimate is recorded.
ConditionReport check_conditions(const Schedule& s,
                                 double f_delta_minus_F0_norm,
                                 double y_norm_est, Index N);

/// The a-priori stopping index: the unique n0 with
/// delta/a(n0+1) > y/(C-1) >= delta/a(n0). Throws if the inputs are
/// inconsistent (delta/a(0) already above the threshold) or n0 would
/// exceed 1e8.
Index a_priori_index(const Schedule& s, double delta, double y_norm_est);

}  // namespace dsm
