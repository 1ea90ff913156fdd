#include "isgd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "isgd/common.hpp"

namespace isgd {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) {
    return "";  // blank field: not measured at this row
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // keep LF endings everywhere
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  return out;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::plain:
      return "plain";
    case Variant::momentum:
      return "momentum";
    case Variant::nesterov:
      return "nesterov";
  }
  return "plain";
}

std::string scenario_name(BatchScenario s) {
  return s == BatchScenario::iid ? "iid" : "single_class";
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) {
    throw std::invalid_argument("need at least one seed");
  }
  if (epochs < 1) {
    throw std::invalid_argument("epochs must be >= 1");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("batch size must be positive");
  }
  if (workers < 1) {
    throw std::invalid_argument("worker count must be positive");
  }
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw std::invalid_argument("holdout fraction must be in [0, 1)");
  }
  if (dataset == DatasetKind::mnist &&
      (mnist_images.empty() || mnist_labels.empty())) {
    throw std::invalid_argument("mnist mode needs image and label paths");
  }
  opt.validate();
}

std::pair<Dataset, Dataset> build_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset == DatasetKind::mnist) {
    Dataset train = load_mnist_idx(cfg.mnist_images, cfg.mnist_labels);
    Dataset holdout;
    if (!cfg.mnist_test_images.empty() && !cfg.mnist_test_labels.empty()) {
      holdout = load_mnist_idx(cfg.mnist_test_images, cfg.mnist_test_labels);
    }
    return {std::move(train), std::move(holdout)};
  }
  Dataset all = synth_gaussian(cfg.classes, cfg.per_class, cfg.dim, cfg.spread,
                               cfg.dataset_seed);
  if (cfg.holdout_fraction > 0.0) {
    return split_holdout(all, cfg.holdout_fraction);
  }
  return {std::move(all), Dataset{}};
}

NetworkSpec build_network_spec(const ExperimentConfig& cfg, int input_dim,
                               int classes) {
  NetworkSpec net;
  net.layer_sizes.push_back(input_dim);
  for (int h : cfg.hidden) {
    net.layer_sizes.push_back(h);
  }
  net.layer_sizes.push_back(classes);
  net.activation = cfg.activation;
  net.weight_decay = cfg.opt.weight_decay;
  net.validate();
  return net;
}

void write_run_csv(const std::string& path, const TrainingReport& report) {
  std::ofstream out = open_csv(path);
  out << "iteration,epoch,batch,loss,avg_loss,loss_std,limit,undertrained,"
         "subproblem_iters,passes,train_error,holdout_accuracy\n";

  // last eval per iteration, keyed by iteration index
  std::unordered_map<std::uint64_t, const EvalRecord*> eval_at;
  for (const EvalRecord& ev : report.evals) {
    eval_at[ev.iteration] = &ev;
  }

  for (const IterationRecord& rec : report.iterations) {
    out << rec.iteration << ',' << rec.epoch << ',' << rec.batch_index << ','
        << fmt(rec.loss) << ',' << fmt(rec.avg_loss) << ','
        << fmt(rec.loss_std) << ',' << fmt(rec.limit) << ','
        << (rec.undertrained ? 1 : 0) << ',' << rec.subproblem_iterations
        << ',' << rec.cumulative_passes << ',';
    auto it = eval_at.find(rec.iteration);
    if (it != eval_at.end()) {
      out << fmt(it->second->train_error) << ','
          << fmt(it->second->holdout_accuracy);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

void write_dynamics_csv(const std::string& path, const TrainingReport& report) {
  std::ofstream out = open_csv(path);
  out << "epoch,batch,loss\n";
  for (const IterationRecord& rec : report.iterations) {
    out << rec.epoch << ',' << rec.batch_index << ',' << fmt(rec.loss) << '\n';
  }
}

std::vector<PairedRun> run_train_experiment(const ExperimentConfig& cfg,
                                            bool write_csv) {
  cfg.validate();
  auto [train_ds, holdout] = build_dataset(cfg);
  const NetworkSpec net =
      build_network_spec(cfg, train_ds.dim, train_ds.num_classes);
  const std::size_t n = batch_count(train_ds.size(), cfg.batch_size);
  if (n == 0) {
    throw std::invalid_argument("batch size exceeds training set");
  }

  if (write_csv) {
    std::filesystem::create_directories(cfg.out_dir);
  }

  std::vector<PairedRun> runs;
  for (std::uint64_t seed : cfg.seeds) {
    TrainOptions opts;
    opts.batch_size = cfg.batch_size;
    opts.epochs = cfg.epochs;
    opts.workers = cfg.workers;
    opts.seed = seed;
    opts.permute = cfg.shuffle;
    opts.holdout = holdout.size() > 0 ? &holdout : nullptr;
    opts.eval_every = cfg.eval_every > 0 ? cfg.eval_every : n;

    PairedRun run;
    run.seed = seed;
    opts.accelerate = false;
    run.sgd = train(train_ds, net, cfg.opt, opts);
    opts.accelerate = true;
    run.isgd = train(train_ds, net, cfg.opt, opts);

    log_info("seed %llu: sgd passes=%llu final_avg=%.5f | isgd passes=%llu "
             "final_avg=%.5f (subproblem %llu)",
             static_cast<unsigned long long>(seed),
             static_cast<unsigned long long>(run.sgd.total_passes),
             run.sgd.final_avg_loss,
             static_cast<unsigned long long>(run.isgd.total_passes),
             run.isgd.final_avg_loss,
             static_cast<unsigned long long>(run.isgd.subproblem_passes));

    if (write_csv) {
      const std::string base = cfg.out_dir + "/";
      write_run_csv(base + "sgd_seed" + std::to_string(seed) + ".csv",
                    run.sgd);
      write_run_csv(base + "isgd_seed" + std::to_string(seed) + ".csv",
                    run.isgd);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

TrainingReport run_batch_dynamics(const ExperimentConfig& cfg,
                                  bool write_csv) {
  cfg.validate();
  if (cfg.dataset != DatasetKind::synthetic) {
    throw std::invalid_argument("batch-dynamics runs on synthetic data only");
  }
  const Dataset raw = synth_gaussian(cfg.classes, cfg.per_class, cfg.dim,
                                     cfg.spread, cfg.dataset_seed);
  const Dataset arranged =
      arrange_scenario(raw, cfg.scenario, cfg.batch_size, cfg.dataset_seed);
  const NetworkSpec net =
      build_network_spec(cfg, arranged.dim, arranged.num_classes);

  TrainOptions opts;
  opts.batch_size = cfg.batch_size;
  opts.epochs = cfg.epochs;
  opts.workers = cfg.workers;
  opts.seed = cfg.seeds.front();
  opts.accelerate = false;  // the probe runs plain SGD over fixed batches
  opts.permute = false;
  TrainingReport report = train(arranged, net, cfg.opt, opts);

  if (write_csv) {
    std::filesystem::create_directories(cfg.out_dir);
    write_dynamics_csv(cfg.out_dir + "/batch_dynamics_" +
                           scenario_name(cfg.scenario) + ".csv",
                       report);
  }
  return report;
}

BatchSearchResult run_batch_model(const SystemModel& sys, double target_loss,
                                  long lo, long hi, const std::string& out_dir,
                                  bool write_csv) {
  const BatchSearchResult best = optimal_batch(target_loss, sys, lo, hi);
  if (write_csv) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out = open_csv(out_dir + "/batch_model.csv");
    out << "n_b,time_seconds\n";
    for (long n_b = lo; n_b <= hi; ++n_b) {
      out << n_b << ','
          << fmt(time_for_loss(target_loss, static_cast<double>(n_b), sys))
          << '\n';
    }
    out << best.batch << ',' << fmt(best.seconds) << '\n';  // argmin row
  }
  return best;
}

}  // namespace isgd
