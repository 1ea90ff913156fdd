#include "isgd/spc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isgd/common.hpp"

namespace isgd {

SpcWindow::SpcWindow(std::size_t capacity, double sigma_multiplier)
    : capacity_(capacity), multiplier_(sigma_multiplier) {
  if (capacity == 0) {
    throw std::invalid_argument("window capacity must be positive");
  }
  if (std::isnan(sigma_multiplier) || sigma_multiplier <= 0.0) {
    throw std::invalid_argument("sigma multiplier must be positive");
  }
}

void SpcWindow::push(double loss) {
  if (!std::isfinite(loss)) {
    throw DivergenceError("non-finite loss pushed into the control window");
  }
  if (queue_.size() < capacity_) {
    const double n = static_cast<double>(queue_.size());
    queue_.push_back(loss);
    mean_ = (mean_ * n + loss) / (n + 1.0);
    sum_ += loss;
    sum_sq_ += loss * loss;
  } else {
    const double oldest = queue_.front();
    queue_.pop_front();
    queue_.push_back(loss);
    const double n = static_cast<double>(capacity_);
    mean_ = (mean_ * n - oldest + loss) / n;
    sum_ += loss - oldest;
    sum_sq_ += loss * loss - oldest * oldest;
    warm_ = true;
  }
  ++pushes_;
  if (pushes_ % capacity_ == 0) {
    refresh();
  }
}

void SpcWindow::refresh() {
  CompensatedSum s, sq;
  for (double v : queue_) {
    s.add(v);
    sq.add(v * v);
  }
  sum_ = s.value();
  sum_sq_ = sq.value();
  mean_ = sum_ / static_cast<double>(queue_.size());
  ++refreshes_;
}

double SpcWindow::stddev() const {
  if (queue_.empty()) {
    return 0.0;
  }
  const double n = static_cast<double>(queue_.size());
  const double m = sum_ / n;
  const double var = sum_sq_ / n - m * m;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double SpcWindow::limit() const {
  if (std::isinf(multiplier_)) {
    return std::numeric_limits<double>::infinity();
  }
  return mean_ + multiplier_ * stddev();
}

bool SpcWindow::is_undertrained(double loss) const {
  return warm_ && loss > limit();
}

}  // namespace isgd
