#include "isgd/time_model.hpp"

#include <cmath>
#include <stdexcept>

namespace isgd {

void SystemModel::validate() const {
  if (!(throughput > 0.0)) {
    throw std::invalid_argument("throughput C1 must be positive");
  }
  if (sync_cost < 0.0) {
    throw std::invalid_argument("sync cost C2 must be nonnegative");
  }
}

double iter_time(double n_b, const SystemModel& sys) {
  sys.validate();
  if (!(n_b > 0.0)) {
    throw std::invalid_argument("batch size must be positive");
  }
  return n_b / sys.throughput + sys.sync_cost;
}

LossPrediction loss_after_time(double t, double n_b, const SystemModel& sys) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("time budget must be positive");
  }
  LossPrediction out;
  out.updates = t / iter_time(n_b, sys);
  out.loss = 1.0 / std::sqrt(n_b * out.updates) + 1.0 / out.updates;
  out.valid = out.updates >= 1.0;
  return out;
}

double time_for_loss(double target_loss, double n_b, const SystemModel& sys) {
  sys.validate();
  if (!(target_loss > 0.0)) {
    throw std::invalid_argument("target loss must be positive");
  }
  if (!(n_b > 0.0)) {
    throw std::invalid_argument("batch size must be positive");
  }
  // psi*t = sqrt(t)*a + b with a = sqrt((n_b + C1*C2)/(n_b*C1)),
  // b = n_b/C1 + C2; quadratic in sqrt(t), keep the positive root.
  const double a = std::sqrt((n_b + sys.throughput * sys.sync_cost) /
                             (n_b * sys.throughput));
  const double b = n_b / sys.throughput + sys.sync_cost;
  const double root =
      (a + std::sqrt(a * a + 4.0 * target_loss * b)) / (2.0 * target_loss);
  return root * root;
}

BatchSearchResult optimal_batch(double target_loss, const SystemModel& sys,
                                long lo, long hi) {
  if (lo < 1 || hi < lo) {
    throw std::invalid_argument("invalid batch range");
  }
  BatchSearchResult best{lo, time_for_loss(target_loss, static_cast<double>(lo), sys)};
  for (long n_b = lo + 1; n_b <= hi; ++n_b) {
    const double t = time_for_loss(target_loss, static_cast<double>(n_b), sys);
    if (t < best.seconds) {
      best = {n_b, t};
    }
  }
  return best;
}

}  // namespace isgd
