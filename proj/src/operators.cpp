#include "operators.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "io_util.hpp"
#include "linalg.hpp"

namespace dsm {

namespace {

Vector gaussian_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

Vector unit_direction(int d, std::mt19937_64& rng) {
  // Redraw on a (measure-zero) degenerate draw.
  for (;;) {
    Vector v = gaussian_vector(d, rng);
    const double n = v.norm();
    if (n > 1e-300) return v / n;
  }
}

Vector sample_in_ball(const Vector& u0, double R, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = static_cast<int>(u0.size());
  const double r = R * std::pow(unif(rng), 1.0 / d);
  return u0 + r * unit_direction(d, rng);
}

// Largest singular value via power iteration on J^T J.
double operator_norm(const Matrix& J, std::mt19937_64& rng, int iters = 60) {
  const int d = static_cast<int>(J.cols());
  Vector v = unit_direction(d, rng);
  double sigma = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = J.transpose() * (J * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    sigma = std::sqrt(n);
    v = w / n;
  }
  return sigma;
}

}  // namespace

Matrix fredholm_min_kernel_matrix(int d) {
  require(d >= 1, ErrorCode::invalid_argument,
          "fredholm kernel: dimension must be >= 1");
  Matrix A(d, d);
  for (int i = 0; i < d; ++i) {
    const double xi = (i + 0.5) / d;
    for (int j = 0; j <= i; ++j) {
      const double xj = (j + 0.5) / d;
      const double v = std::min(xi, xj) / d;
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  return A;
}

MonotoneOperator catalog_linear_fredholm(int d) {
  require(d >= 2, ErrorCode::invalid_argument,
          "catalog linear_fredholm: dimension must be >= 2");
  auto A = std::make_shared<const Matrix>(fredholm_min_kernel_matrix(d));
  MonotoneOperator op;
  op.dim = d;
  op.apply = [A](const Vector& u) -> Vector { return (*A) * u; };
  op.jacobian = [A](const Vector&) -> Matrix { return *A; };
  op.catalog = "linear_fredholm";
  return op;
}

MonotoneOperator catalog_cubic(int d, double c) {
  require(d >= 1, ErrorCode::invalid_argument,
          "catalog cubic: dimension must be >= 1");
  require(std::isfinite(c) && c >= 0.0, ErrorCode::invalid_argument,
          "catalog cubic: coefficient c must be >= 0");
  auto A = std::make_shared<const Matrix>(fredholm_min_kernel_matrix(d));
  MonotoneOperator op;
  op.dim = d;
  op.apply = [A, c](const Vector& u) -> Vector {
    return (*A) * u + c * u.array().cube().matrix();
  };
  op.jacobian = [A, c](const Vector& u) -> Matrix {
    Matrix J = *A;
    J.diagonal() += 3.0 * c * u.array().square().matrix();
    return J;
  };
  op.catalog = "cubic";
  op.param_c = c;
  return op;
}

MonotoneOperator catalog_anti_monotone(int d) {
  require(d >= 1, ErrorCode::invalid_argument,
          "catalog anti_monotone: dimension must be >= 1");
  MonotoneOperator op;
  op.dim = d;
  op.apply = [](const Vector& u) -> Vector { return -u; };
  op.jacobian = [d](const Vector&) -> Matrix {
    return -Matrix::Identity(d, d);
  };
  op.catalog = "anti_monotone";
  return op;
}

MonotoneOperator make_catalog_operator(const std::string& id, int d,
                                       double c) {
  if (id == "linear_fredholm") return catalog_linear_fredholm(d);
  if (id == "cubic") return catalog_cubic(d, c);
  if (id == "anti_monotone") return catalog_anti_monotone(d);
  fail(ErrorCode::invalid_argument, "unknown catalog id '" + id + "'");
}

MonotoneProblem make_problem(MonotoneOperator op, Vector y, double delta,
                             std::uint64_t seed) {
  require(op.dim == y.size(), ErrorCode::dimension_mismatch,
          "make_problem: y dimension does not match operator");
  require(std::isfinite(delta) && delta > 0, ErrorCode::invalid_argument,
          "make_problem: delta must be positive");
  require_finite(y, "make_problem: y");

  MonotoneProblem p;
  p.f = op.apply(y);
  std::mt19937_64 rng(seed);
  Vector noise = delta * unit_direction(op.dim, rng);
  // Rounding in f + noise quantizes the realized distance at the ulp scale
  // of f. Redraw with an ulp-sized dither, rescaled to exact length delta,
  // and keep the best realization of ||f_delta - f||.
  const double dither_scale =
      4.0 * std::numeric_limits<double>::epsilon() *
      (p.f.norm() / std::sqrt(static_cast<double>(op.dim)) + delta);
  Vector cand = p.f + noise;
  Vector best = cand;
  double best_err = std::abs((cand - p.f).norm() - delta);
  for (int k = 0; k < 24 && best_err > 1e-15 * delta; ++k) {
    Vector jitter = noise + dither_scale * gaussian_vector(op.dim, rng);
    jitter *= delta / jitter.norm();
    cand = p.f + jitter;
    const double err = std::abs((cand - p.f).norm() - delta);
    if (err < best_err) {
      best = cand;
      best_err = err;
    }
  }
  p.f_delta = std::move(best);
  p.op = std::move(op);
  p.y = std::move(y);
  p.delta = delta;
  p.seed = seed;
  return p;
}

OperatorBounds estimate_bounds(const MonotoneOperator& op, const Vector& u0,
                               double R, int samples, std::uint64_t seed) {
  require(op.dim == u0.size(), ErrorCode::dimension_mismatch,
          "estimate_bounds: u0 dimension does not match operator");
  require(std::isfinite(R) && R > 0, ErrorCode::invalid_argument,
          "estimate_bounds: R must be positive");
  require(samples >= 1, ErrorCode::invalid_argument,
          "estimate_bounds: need at least one sample");

  std::mt19937_64 rng(seed);
  const double eps = 1e-4 * R;
  OperatorBounds b;
  b.R = R;
  b.u0 = u0;
  for (int s = 0; s < samples; ++s) {
    const Vector u = sample_in_ball(u0, R, rng);
    b.M0 = std::max(b.M0, op.apply(u).norm());
    const Matrix J = op.jacobian(u);
    b.M1 = std::max(b.M1, operator_norm(J, rng));
    const Vector h = unit_direction(op.dim, rng);
    const Matrix D = (op.jacobian(u + eps * h) - J) / eps;
    b.M2 = std::max(b.M2, operator_norm(D, rng));
  }
  return b;
}

MonotonicityReport verify_monotone(const MonotoneOperator& op,
                                   double region_radius, int pairs,
                                   std::uint64_t seed) {
  require(pairs >= 1, ErrorCode::invalid_argument,
          "verify_monotone: need at least one pair");
  std::mt19937_64 rng(seed);
  const Vector center = Vector::Zero(op.dim);
  MonotonicityReport rep;
  rep.monotone = true;
  rep.worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    const Vector u = sample_in_ball(center, region_radius, rng);
    const Vector v = sample_in_ball(center, region_radius, rng);
    const Vector du = u - v;
    const double val = inner(op.apply(u) - op.apply(v), du);
    rep.worst = std::min(rep.worst, val);
    const double eps_mono = 1e-10 * (1.0 + du.squaredNorm());
    if (val < -eps_mono) rep.monotone = false;
  }
  return rep;
}

void save_problem(const MonotoneProblem& p, const std::string& path) {
  require(p.op.catalog != "custom", ErrorCode::invalid_argument,
          "save_problem: only catalog operators are serializable");
  std::ostringstream out;
  out << "catalog = " << p.op.catalog << "\n";
  out << "dim = " << p.op.dim << "\n";
  out << "c = " << fmt17(p.op.param_c) << "\n";
  out << "delta = " << fmt17(p.delta) << "\n";
  out << "seed = " << p.seed << "\n";
  out << "y = " << join17(p.y) << "\n";
  write_text_file(path, out.str());
}

MonotoneProblem load_problem(const std::string& path) {
  const auto kv = parse_kv_file(path);
  const std::string catalog = kv_get(kv, "catalog");
  const int d = static_cast<int>(kv_get_int(kv, "dim"));
  const double c = kv_get_double(kv, "c");
  const double delta = kv_get_double(kv, "delta");
  const std::uint64_t seed =
      static_cast<std::uint64_t>(kv_get_int(kv, "seed"));
  const Vector y = parse_vector(kv_get(kv, "y"));
  require(y.size() == d, ErrorCode::parse,
          "problem file: y length does not match dim");
  return make_problem(make_catalog_operator(catalog, d, c), y, delta, seed);
}

}  // namespace dsm
