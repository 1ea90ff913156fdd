#pragma once

#include <cstdint>
#include <vector>

#include "isgd/dataset.hpp"
#include "isgd/network.hpp"
#include "isgd/spc.hpp"

namespace isgd {

enum class Variant { plain, momentum, nesterov };

// Learning-rate tier: applies while the running average loss is at or
// above `threshold`. Tiers are ordered by strictly decreasing threshold
// and the last one acts as the catch-all.
struct LrTier {
  double threshold = 0.0;
  double lr = 0.0;
};

struct OptimizerConfig {
  double base_lr = 0.01;       // used when lr_schedule is empty
  double subproblem_lr = 0.0;  // 0 = follow the learning rate in effect
  double momentum = 0.0;       // mu in [0, 1)
  double weight_decay = 1e-4;
  double epsilon = 0.1;          // proximal weight of the subproblem
  int stop = 5;                  // max subproblem iterations
  double sigma_multiplier = 3.0; // k of the control limit; +inf disables
  Variant variant = Variant::plain;
  std::vector<LrTier> lr_schedule;

  void validate() const;
};

// Learning rate of the first tier whose interval contains avg_loss; the
// lowest tier catches everything below its threshold.
double lr_from_schedule(double avg_loss, const std::vector<LrTier>& schedule);
double current_lr(double avg_loss, const OptimizerConfig& cfg);

// w <- w - lr * grad
void sgd_step(ParameterVector& w, const ParameterVector& grad, double lr);

// v <- mu * v - lr * grad; w <- w + v
void momentum_step(ParameterVector& w, ParameterVector& v,
                   const ParameterVector& grad, double lr, double mu);

// Lookahead point w + mu * v at which the Nesterov gradient is evaluated.
ParameterVector nesterov_lookahead(const ParameterVector& w,
                                   const ParameterVector& v, double mu);

// v <- mu * v - lr * grad_at_lookahead; w <- w + v
void nesterov_step(ParameterVector& w, ParameterVector& v,
                   const ParameterVector& grad_at_lookahead, double lr,
                   double mu);

// Gradient of the conservative subproblem
//   phi(w) = 1/2 (psi(w) - limit)^2 + eps/(2 n_w) ||w - w_prev||^2,
// i.e. (psi - limit) * grad_psi + eps/n_w * (w - w_prev). limit, w_prev
// and the batch are constants of the subproblem.
ParameterVector subproblem_gradient(const ParameterVector& w,
                                    const ParameterVector& w_prev,
                                    double batch_loss,
                                    const ParameterVector& batch_grad,
                                    double limit, double epsilon,
                                    std::size_t n_w);

struct AccelerationResult {
  int iterations = 0;    // forward/backward passes consumed
  double final_loss = 0; // last measured loss on the batch
};

// Early-stopped gradient descent on the subproblem: repeat forward/backward
// on the same batch and step along -zeta * grad_phi while the loss stays
// above the limit and fewer than `stop` iterations have run. w_prev is the
// weight snapshot taken at entry and stays constant throughout; momentum
// velocity is not touched.
AccelerationResult accelerate_batch(ParameterVector& w, const Batch& batch,
                                    const NetworkSpec& spec, double limit,
                                    double entry_loss,
                                    const OptimizerConfig& cfg, double zeta,
                                    int workers);

struct IterationRecord {
  std::uint64_t iteration = 0;
  std::uint32_t epoch = 0;
  std::uint32_t batch_index = 0;
  double loss = 0.0;      // mean batch loss pushed into the window
  double avg_loss = 0.0;  // window mean after the push
  double loss_std = 0.0;  // window std after the push
  double limit = 0.0;     // control limit after the push
  bool undertrained = false;
  std::uint32_t subproblem_iterations = 0;
  std::uint64_t cumulative_passes = 0;  // training passes incl. subproblem
};

struct EvalRecord {
  std::uint64_t iteration = 0;
  std::uint64_t passes = 0;
  double train_error = 0.0;
  double holdout_accuracy = 0.0;  // NaN when no held-out set is given
};

struct TrainingReport {
  std::vector<IterationRecord> iterations;
  std::vector<EvalRecord> evals;
  std::uint64_t main_iterations = 0;
  std::uint64_t subproblem_passes = 0;
  std::uint64_t total_passes = 0;  // main_iterations + subproblem_passes
  double final_avg_loss = 0.0;
  ParameterVector final_weights;

  std::vector<std::vector<double>> losses_by_epoch() const;
};

struct TrainOptions {
  std::size_t batch_size = 0;
  int epochs = 1;
  int workers = 1;
  std::uint64_t seed = 0;
  bool accelerate = true;     // false = plain SGD baseline, window still kept
  bool permute = true;        // false keeps the caller's example order
  const Dataset* holdout = nullptr;
  std::uint64_t eval_every = 0;  // training passes between evals; 0 = never
};

// The main training loop: fixed-cycle batches, one loss per iteration into
// the control window, schedule-driven learning rate, the configured update
// rule, and (when enabled and warm) the acceleration subproblem on any
// batch whose loss exceeds the control limit.
TrainingReport train(const Dataset& ds, const NetworkSpec& spec,
                     const OptimizerConfig& cfg, const TrainOptions& opts);

}  // namespace isgd
