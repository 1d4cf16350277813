#pragma once

#include "types.hpp"

namespace dsm {

/// Euclidean inner product. Throws on dimension mismatch.
double inner(const Vector& u, const Vector& v);

struct RegSolveOptions {
  // Relative residual tolerance ||(J+aI)z - w|| <= tol * ||w||.
  double tol = 1e-12;
  int max_refine = 3;
};

/// Solves (J + a*I) z = w by dense LU with partial pivoting plus iterative
/// refinement. J need not be symmetric; for a monotone operator the shifted
/// matrix is invertible for any a > 0, so failure to reach the residual
/// tolerance is reported as a breakdown naming the smallest pivot seen.
Vector reg_solve(const Matrix& J, double a, const Vector& w,
                 const RegSolveOptions& opts = {});

/// Same solve for a matrix that is already shifted by a*I. Saves one matrix
/// copy on hot paths where the caller owns a temporary.
Vector reg_solve_shifted(const Matrix& M, const Vector& w,
                         const RegSolveOptions& opts = {});

}  // namespace dsm
