#pragma once

#include <functional>
#include <string>

#include "types.hpp"

namespace dsm {

// A monotone operator F on R^d: <F(u)-F(v), u-v> >= 0, together with its
// Jacobian map u -> F'(u). Both callables are pure; the struct is a value
// type and cheap to copy (catalog operators share their matrix internally).
struct MonotoneOperator {
  int dim = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Matrix(const Vector&)> jacobian;
  // Catalog identity, kept for serialization of problem instances.
  std::string catalog = "custom";
  double param_c = 0.0;
};

// Empirical estimates of M_j = sup over B(u0,R) of ||F^(j)||, j = 0,1,2.
// Sampling-based, so these are lower estimates of the true suprema.
struct OperatorBounds {
  double M0 = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double R = 0.0;
  Vector u0;
};

struct MonotonicityReport {
  bool monotone = false;
  double worst = 0.0;  // min over samples of <F(u)-F(v), u-v>
};

// A test problem with known exact solution y, exact data f = F(y), and
// noisy data at exact distance ||f_delta - f|| = delta.
struct MonotoneProblem {
  MonotoneOperator op;
  Vector y;
  Vector f;
  double delta = 0.0;
  Vector f_delta;
  std::uint64_t seed = 0;
};

/// Galerkin/collocation discretization of (Ku)(x) = int_0^1 min(x,t) u(t) dt
/// on midpoint nodes x_i = (i-1/2)/d with uniform weight 1/d. Symmetric
/// positive definite, condition number growing like d^2.
Matrix fredholm_min_kernel_matrix(int d);

/// Linear ill-posed catalog operator F(u) = A u. Requires d >= 2.
MonotoneOperator catalog_linear_fredholm(int d);

/// Nonlinear monotone catalog operator F(u) = A u + c * u.^3 with
/// F'(u) = A + 3c diag(u.^2). Requires d >= 1, c >= 0.
MonotoneOperator catalog_cubic(int d, double c);

/// Negative control for the verification suite: F(u) = -u is anti-monotone.
MonotoneOperator catalog_anti_monotone(int d);

/// Builds a catalog operator by id ("linear_fredholm", "cubic",
/// "anti_monotone"); throws on unknown ids.
MonotoneOperator make_catalog_operator(const std::string& id, int d, double c);

/// Creates a problem with f = F(y) and f_delta = f + delta * e/||e|| for a
/// seeded pseudo-random direction e, so that ||f_delta - f|| = delta exactly
/// up to rounding.
MonotoneProblem make_problem(MonotoneOperator op, Vector y, double delta,
                             std::uint64_t seed);

/// Samples `samples` points in the ball B(u0, R) and estimates M0, M1, M2.
/// M1 uses power iteration on J^T J; M2 uses first-order differences of the
/// Jacobian with step 1e-4 * R.
OperatorBounds estimate_bounds(const MonotoneOperator& op, const Vector& u0,
                               double R, int samples, std::uint64_t seed = 1);

/// Checks <F(u)-F(v), u-v> >= -eps_mono on sampled pairs in the ball of the
/// given radius, with eps_mono = 1e-10 * (1 + ||u-v||^2).
MonotonicityReport verify_monotone(const MonotoneOperator& op,
                                   double region_radius, int pairs,
                                   std::uint64_t seed);

/// Problem-instance serialization (dimension, catalog id, parameters, y,
/// delta, seed) as a key-value text file. Only catalog operators can be
/// reconstructed on load.
void save_problem(const MonotoneProblem& p, const std::string& path);
MonotoneProblem load_problem(const std::string& path);

}  // namespace dsm
