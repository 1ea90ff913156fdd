#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace isgd {

// Thrown when a loss, gradient or weight turns non-finite. The training
// loop never tries to recover from this; the run is reported and aborted.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Neumaier compensated accumulator. Summation order must not be able to
// shift batch losses/gradients by more than ~1e-12, so plain += is not
// enough where we sum over examples.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Same scheme for accumulating into an array slot.
inline void compensated_add(double& sum, double& comp, double x) {
  double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

// Verbosity from ISGD_LOG (0 = quiet, 1 = info, 2 = debug).
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("ISGD_LOG");
    return v ? std::atoi(v) : 0;
  }();
  return level;
}

template <typename... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= 1) {
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
  }
}

template <typename... Args>
void log_debug(const char* fmt, Args... args) {
  if (log_level() >= 2) {
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
  }
}

}  // namespace isgd
