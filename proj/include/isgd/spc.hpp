#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

namespace isgd {

// Control chart over the previous epoch of batch losses. A fixed-length
// queue tracks the last `capacity` losses; mean, population standard
// deviation and the upper control limit (mean + k * std) are maintained
// in O(1) per push via running sums, refreshed from scratch once per
// epoch to bound floating-point drift.
//
// The window is "warm" once a full epoch has been seen and the limit has
// been computed at least once; the under-trained test never fires before
// that.
class SpcWindow {
 public:
  explicit SpcWindow(std::size_t capacity, double sigma_multiplier = 3.0);

  // Appends a loss. During warm-up the running mean follows the
  // incremental-average recurrence; once full, the oldest loss is dequeued
  // and mean/std/limit are updated. Throws DivergenceError on a non-finite
  // loss.
  void push(double loss);

  // Strictly above the control limit, and only once warm.
  bool is_undertrained(double loss) const;

  double mean() const { return mean_; }
  double stddev() const;
  double limit() const;  // mean + k * stddev; +inf for an infinite k

  bool warm() const { return warm_; }
  std::size_t size() const { return queue_.size(); }
  std::size_t capacity() const { return capacity_; }
  double sigma_multiplier() const { return multiplier_; }

  // Bookkeeping used to assert the amortized O(1) cost: each refresh is
  // one O(capacity) pass and happens once per epoch of pushes.
  std::uint64_t push_count() const { return pushes_; }
  std::uint64_t refresh_count() const { return refreshes_; }

 private:
  void refresh();

  std::deque<double> queue_;
  std::size_t capacity_;
  double multiplier_;
  double mean_ = 0.0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  bool warm_ = false;
  std::uint64_t pushes_ = 0;
  std::uint64_t refreshes_ = 0;
};

}  // namespace isgd
