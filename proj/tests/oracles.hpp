// Test-only oracles, independent of the library code paths they check:
// central finite differences for gradients, from-scratch window statistics,
// and a bisection root finder for the time-domain model.
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <vector>

#include "isgd/network.hpp"

namespace oracle {

// Central finite difference of f along coordinate i of x.
inline double central_diff(const std::function<double(const isgd::ParameterVector&)>& f,
                           isgd::ParameterVector x, std::size_t i,
                           double h = 1e-5) {
  const double orig = x[i];
  x[i] = orig + h;
  const double hi = f(x);
  x[i] = orig - h;
  const double lo = f(x);
  x[i] = orig;
  return (hi - lo) / (2.0 * h);
}

// Relative error with the usual unit floor, as in gradient-check harnesses.
inline double rel_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

// Max relative error of `grad` against central differences of f on the
// given coordinates.
inline double max_grad_error(
    const std::function<double(const isgd::ParameterVector&)>& f,
    const isgd::ParameterVector& x, const isgd::ParameterVector& grad,
    const std::vector<std::size_t>& coords, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i : coords) {
    worst = std::max(worst, rel_error(grad[i], central_diff(f, x, i, h)));
  }
  return worst;
}

struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Two-pass recomputation over the stored window contents.
inline WindowStats recompute(const std::deque<double>& window) {
  WindowStats s;
  if (window.empty()) {
    return s;
  }
  const double n = static_cast<double>(window.size());
  for (double v : window) {
    s.mean += v;
  }
  s.mean /= n;
  double acc = 0.0;
  for (double v : window) {
    acc += (v - s.mean) * (v - s.mean);
  }
  s.stddev = std::sqrt(acc / n);
  return s;
}

// Smallest root of g on [lo, hi] by bisection; assumes a sign change.
inline double bisect(const std::function<double(double)>& g, double lo,
                     double hi, int iters = 200) {
  double flo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = g(mid);
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
