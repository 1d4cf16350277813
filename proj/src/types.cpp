#include "types.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace dsm {

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite())
    fail(ErrorCode::invalid_argument, what + " contains NaN or Inf");
}

int log_level() {
  static int level = [] {
    const char* env = std::getenv("DSM_LOG");
    if (!env || !*env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env) return 0;
    return static_cast<int>(v < 0 ? 0 : (v > 2 ? 2 : v));
  }();
  return level;
}

void log_msg(int level, const std::string& msg) {
  if (log_level() >= level) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[dsm] " << msg << "\n";
  }
}

}  // namespace dsm
