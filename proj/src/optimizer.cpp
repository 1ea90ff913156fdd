#include "isgd/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isgd/common.hpp"
#include "isgd/parallel.hpp"

namespace isgd {

void OptimizerConfig::validate() const {
  if (base_lr <= 0.0) {
    throw std::invalid_argument("base learning rate must be positive");
  }
  if (subproblem_lr < 0.0) {
    throw std::invalid_argument("subproblem learning rate must be >= 0");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("momentum must lie in [0, 1)");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("weight decay must be nonnegative");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  if (stop < 0) {
    throw std::invalid_argument("stop must be nonnegative");
  }
  if (std::isnan(sigma_multiplier) || sigma_multiplier <= 0.0) {
    throw std::invalid_argument("sigma multiplier must be positive");
  }
  for (std::size_t i = 0; i < lr_schedule.size(); ++i) {
    if (lr_schedule[i].lr <= 0.0) {
      throw std::invalid_argument("schedule learning rates must be positive");
    }
    if (i > 0 && lr_schedule[i].threshold >= lr_schedule[i - 1].threshold) {
      throw std::invalid_argument(
          "schedule thresholds must be strictly decreasing");
    }
  }
}

double lr_from_schedule(double avg_loss, const std::vector<LrTier>& schedule) {
  if (schedule.empty()) {
    throw std::invalid_argument("empty learning-rate schedule");
  }
  for (const LrTier& tier : schedule) {
    if (avg_loss >= tier.threshold) {
      return tier.lr;
    }
  }
  return schedule.back().lr;
}

double current_lr(double avg_loss, const OptimizerConfig& cfg) {
  return cfg.lr_schedule.empty() ? cfg.base_lr
                                 : lr_from_schedule(avg_loss, cfg.lr_schedule);
}

namespace {

void check_shapes(const ParameterVector& a, const ParameterVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("parameter/gradient size mismatch");
  }
}

void check_finite(const ParameterVector& w, const char* what) {
  if (!w.all_finite()) {
    throw DivergenceError(std::string("non-finite result in ") + what);
  }
}

}  // namespace

void sgd_step(ParameterVector& w, const ParameterVector& grad, double lr) {
  check_shapes(w, grad);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] -= lr * grad[i];
  }
  check_finite(w, "sgd_step");
}

void momentum_step(ParameterVector& w, ParameterVector& v,
                   const ParameterVector& grad, double lr, double mu) {
  check_shapes(w, grad);
  check_shapes(w, v);
  for (std::size_t i = 0; i < w.size(); ++i) {
    v[i] = mu * v[i] - lr * grad[i];
    w[i] += v[i];
  }
  check_finite(w, "momentum_step");
}

ParameterVector nesterov_lookahead(const ParameterVector& w,
                                   const ParameterVector& v, double mu) {
  check_shapes(w, v);
  ParameterVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = w[i] + mu * v[i];
  }
  return out;
}

void nesterov_step(ParameterVector& w, ParameterVector& v,
                   const ParameterVector& grad_at_lookahead, double lr,
                   double mu) {
  check_shapes(w, grad_at_lookahead);
  check_shapes(w, v);
  for (std::size_t i = 0; i < w.size(); ++i) {
    v[i] = mu * v[i] - lr * grad_at_lookahead[i];
    w[i] += v[i];
  }
  check_finite(w, "nesterov_step");
}

ParameterVector subproblem_gradient(const ParameterVector& w,
                                    const ParameterVector& w_prev,
                                    double batch_loss,
                                    const ParameterVector& batch_grad,
                                    double limit, double epsilon,
                                    std::size_t n_w) {
  check_shapes(w, w_prev);
  check_shapes(w, batch_grad);
  if (!std::isfinite(limit)) {
    throw std::invalid_argument("subproblem limit must be finite");
  }
  if (n_w == 0) {
    throw std::invalid_argument("n_w must be positive");
  }
  const double gap = batch_loss - limit;
  const double prox = epsilon / static_cast<double>(n_w);
  ParameterVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = gap * batch_grad[i] + prox * (w[i] - w_prev[i]);
  }
  check_finite(out, "subproblem_gradient");
  return out;
}

AccelerationResult accelerate_batch(ParameterVector& w, const Batch& batch,
                                    const NetworkSpec& spec, double limit,
                                    double entry_loss,
                                    const OptimizerConfig& cfg, double zeta,
                                    int workers) {
  AccelerationResult res;
  res.final_loss = entry_loss;
  if (cfg.stop > 0 && zeta <= 0.0) {
    throw std::invalid_argument("subproblem learning rate must be positive");
  }

  const ParameterVector w_prev = w;  // constant throughout the subproblem
  double psi = entry_loss;
  while (res.iterations < cfg.stop && psi > limit) {
    const LossAndGrad fb = parallel_forward_backward(w, batch, spec, workers);
    psi = fb.loss;
    const ParameterVector g_phi = subproblem_gradient(
        w, w_prev, psi, fb.grad, limit, cfg.epsilon, w.size());
    sgd_step(w, g_phi, zeta);
    ++res.iterations;
  }
  res.final_loss = psi;
  return res;
}

std::vector<std::vector<double>> TrainingReport::losses_by_epoch() const {
  std::vector<std::vector<double>> epochs;
  for (const IterationRecord& rec : iterations) {
    if (rec.epoch >= epochs.size()) {
      epochs.resize(rec.epoch + 1);
    }
    epochs[rec.epoch].push_back(rec.loss);
  }
  return epochs;
}

TrainingReport train(const Dataset& ds, const NetworkSpec& spec,
                     const OptimizerConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  if (opts.batch_size == 0) {
    throw std::invalid_argument("batch size must be positive");
  }
  if (opts.epochs < 1) {
    throw std::invalid_argument("need at least one epoch");
  }
  const std::size_t n = batch_count(ds.size(), opts.batch_size);
  if (n == 0) {
    throw std::invalid_argument("batch size exceeds dataset size");
  }

  NetworkSpec net = spec;
  net.weight_decay = cfg.weight_decay;
  net.validate();

  const Dataset data = opts.permute ? permute_dataset(ds, opts.seed) : ds;

  ParameterVector w = init_network(net, opts.seed);
  ParameterVector v(w.size());
  SpcWindow wnd(n, cfg.sigma_multiplier);

  TrainingReport report;
  const std::uint64_t total_iters =
      static_cast<std::uint64_t>(opts.epochs) * n;
  report.iterations.reserve(total_iters);

  std::uint64_t passes = 0;
  std::uint64_t next_eval = opts.eval_every;

  auto evaluate = [&](std::uint64_t iteration) {
    EvalRecord ev;
    ev.iteration = iteration;
    ev.passes = passes;
    ev.train_error = 1.0 - accuracy(w, data, net);
    ev.holdout_accuracy = opts.holdout != nullptr
                              ? accuracy(w, *opts.holdout, net)
                              : std::numeric_limits<double>::quiet_NaN();
    report.evals.push_back(ev);
  };

  for (std::uint64_t j = 0; j < total_iters; ++j) {
    const std::size_t t = fcpr_index(j, data.size(), opts.batch_size);
    const Batch batch = batch_at(data, opts.batch_size, t);

    LossAndGrad fb;
    if (cfg.variant == Variant::nesterov) {
      const ParameterVector lookahead = nesterov_lookahead(w, v, cfg.momentum);
      fb = parallel_forward_backward(lookahead, batch, net, opts.workers);
    } else {
      fb = parallel_forward_backward(w, batch, net, opts.workers);
    }
    ++passes;

    wnd.push(fb.loss);
    const double lr = current_lr(wnd.mean(), cfg);

    switch (cfg.variant) {
      case Variant::plain:
        sgd_step(w, fb.grad, lr);
        break;
      case Variant::momentum:
        momentum_step(w, v, fb.grad, lr, cfg.momentum);
        break;
      case Variant::nesterov:
        nesterov_step(w, v, fb.grad, lr, cfg.momentum);
        break;
    }

    IterationRecord rec;
    rec.iteration = j;
    rec.epoch = static_cast<std::uint32_t>(j / n);
    rec.batch_index = static_cast<std::uint32_t>(t);
    rec.loss = fb.loss;
    rec.avg_loss = wnd.mean();
    rec.loss_std = wnd.stddev();
    rec.limit = wnd.limit();
    rec.undertrained = wnd.is_undertrained(fb.loss);

    if (opts.accelerate && rec.undertrained && cfg.stop > 0) {
      const double zeta = cfg.subproblem_lr > 0.0 ? cfg.subproblem_lr : lr;
      const AccelerationResult acc = accelerate_batch(
          w, batch, net, wnd.limit(), fb.loss, cfg, zeta, opts.workers);
      rec.subproblem_iterations = static_cast<std::uint32_t>(acc.iterations);
      passes += acc.iterations;
      report.subproblem_passes += acc.iterations;
    }

    rec.cumulative_passes = passes;
    report.iterations.push_back(rec);

    if (opts.eval_every > 0) {
      while (passes >= next_eval) {
        evaluate(j);
        next_eval += opts.eval_every;
      }
    }

    if (rec.epoch != ((j + 1) / n) || j + 1 == total_iters) {
      log_debug("epoch %u done: avg_loss=%.6f std=%.6f", rec.epoch,
                wnd.mean(), wnd.stddev());
    }
  }

  if (opts.eval_every > 0 &&
      (report.evals.empty() || report.evals.back().passes != passes)) {
    evaluate(total_iters - 1);
  }

  report.main_iterations = total_iters;
  report.total_passes = passes;
  report.final_avg_loss = wnd.mean();
  report.final_weights = std::move(w);
  return report;
}

}  // namespace isgd
