#pragma once

namespace isgd {

// Time-domain convergence model: a system processes C1 examples per second
// and pays C2 seconds of synchronization per gradient update.
struct SystemModel {
  double throughput = 1.0;  // C1, examples per second
  double sync_cost = 0.0;   // C2, seconds per iteration

  void validate() const;
};

// Seconds per gradient update: n_b / C1 + C2.
double iter_time(double n_b, const SystemModel& sys);

struct LossPrediction {
  double loss = 0.0;
  double updates = 0.0;  // T, gradient updates that fit in the budget
  bool valid = false;    // model holds only for T >= 1
};

// Loss after training for t seconds at batch size n_b, treating the
// 1/sqrt(n_b T) + 1/T bound as an equality.
LossPrediction loss_after_time(double t, double n_b, const SystemModel& sys);

// Closed-form seconds to reach a target loss: the unique positive root of
//   psi * t = sqrt(t) * sqrt((n_b + C1 C2) / (n_b C1)) + n_b / C1 + C2
// solved as a quadratic in sqrt(t).
double time_for_loss(double target_loss, double n_b, const SystemModel& sys);

struct BatchSearchResult {
  long batch = 0;
  double seconds = 0.0;
};

// Integer grid search over [lo, hi] minimizing time_for_loss; ties break
// toward the smaller batch.
BatchSearchResult optimal_batch(double target_loss, const SystemModel& sys,
                                long lo, long hi);

}  // namespace isgd
