#include "linalg.hpp"

#include <cmath>
#include <sstream>

namespace dsm {

double inner(const Vector& u, const Vector& v) {
  require(u.size() == v.size(), ErrorCode::dimension_mismatch,
          "inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
              std::to_string(v.size()) + ")");
  return u.dot(v);
}

Vector reg_solve_shifted(const Matrix& M, const Vector& w,
                         const RegSolveOptions& opts) {
  require(M.rows() == M.cols(), ErrorCode::invalid_argument,
          "reg_solve: matrix must be square");
  require(M.rows() == w.size(), ErrorCode::dimension_mismatch,
          "reg_solve: matrix/vector dimension mismatch");

  Eigen::PartialPivLU<Matrix> lu(M);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();

  Vector z = lu.solve(w);
  const double wn = w.norm();
  double rn = (w - M * z).norm();
  for (int k = 0; k < opts.max_refine && rn > opts.tol * wn; ++k) {
    z += lu.solve(w - M * z);
    rn = (w - M * z).norm();
  }

  if (!z.allFinite() || rn > opts.tol * wn) {
    std::ostringstream msg;
    msg << "reg_solve: breakdown, relative residual "
        << (wn > 0 ? rn / wn : rn) << " exceeds tolerance " << opts.tol
        << "; smallest pivot " << min_pivot
        << " (non-monotone operator or shift too small for rounding)";
    fail(ErrorCode::solver_breakdown, msg.str());
  }
  return z;
}

Vector reg_solve(const Matrix& J, double a, const Vector& w,
                 const RegSolveOptions& opts) {
  require(std::isfinite(a) && a > 0, ErrorCode::invalid_argument,
          "reg_solve: shift a must be positive and finite");
  Matrix M = J;
  M.diagonal().array() += a;
  return reg_solve_shifted(M, w, opts);
}

}  // namespace dsm
