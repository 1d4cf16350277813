#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsm {

// The discretized Hilbert space is R^d with the Euclidean inner product;
// grid weights are folded into the operators.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = std::int64_t;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  solver_breakdown,
  no_crossing,
  not_converged,
  io,
  parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);
void require_finite(const Vector& v, const std::string& what);

// Verbosity from the DSM_LOG environment variable (0 = silent, 1 = info,
// 2 = debug). Messages go to stderr.
int log_level();
void log_msg(int level, const std::string& msg);

}  // namespace dsm
