// Command-line front end: paired SGD-vs-ISGD experiments, the controlled
// batch-dynamics scenarios, and the batch-size/time model sweep. All
// outputs are CSV files meant for external plotting.

#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isgd/experiment.hpp"

namespace {

std::vector<isgd::LrTier> parse_schedule(const std::string& text) {
  // "2.0:0.015,1.2:0.0015,0:0.00015" -> tiers by decreasing threshold
  std::vector<isgd::LrTier> tiers;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw CLI::ValidationError("--lr-schedule",
                                 "expected THRESHOLD:LR pairs, got " + item);
    }
    tiers.push_back(
        {std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return tiers;
}

void add_dataset_options(CLI::App* cmd, isgd::ExperimentConfig& cfg) {
  const std::map<std::string, isgd::DatasetKind> kinds{
      {"synthetic", isgd::DatasetKind::synthetic},
      {"mnist", isgd::DatasetKind::mnist}};
  cmd->add_option("--dataset", cfg.dataset, "dataset source")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
  cmd->add_option("--classes", cfg.classes, "synthetic: class count");
  cmd->add_option("--per-class", cfg.per_class,
                  "synthetic: examples generated per class");
  cmd->add_option("--dim", cfg.dim, "synthetic: feature dimension");
  cmd->add_option("--spread", cfg.spread, "synthetic: cluster std deviation");
  cmd->add_option("--dataset-seed", cfg.dataset_seed,
                  "synthetic: generator seed (fixed across run seeds)");
  cmd->add_option("--holdout-fraction", cfg.holdout_fraction,
                  "synthetic: per-class fraction held out for accuracy");
  cmd->add_option("--mnist-images", cfg.mnist_images, "IDX image file");
  cmd->add_option("--mnist-labels", cfg.mnist_labels, "IDX label file");
  cmd->add_option("--mnist-test-images", cfg.mnist_test_images,
                  "IDX test image file");
  cmd->add_option("--mnist-test-labels", cfg.mnist_test_labels,
                  "IDX test label file");
}

void add_training_options(CLI::App* cmd, isgd::ExperimentConfig& cfg,
                          std::string& schedule_text) {
  const std::map<std::string, isgd::Variant> variants{
      {"plain", isgd::Variant::plain},
      {"momentum", isgd::Variant::momentum},
      {"nesterov", isgd::Variant::nesterov}};
  const std::map<std::string, isgd::Activation> activations{
      {"relu", isgd::Activation::relu}, {"tanh", isgd::Activation::tanh}};

  cmd->add_option("--hidden", cfg.hidden,
                  "hidden layer sizes, e.g. --hidden 64 32");
  cmd->add_option("--activation", cfg.activation, "hidden activation")
      ->transform(CLI::CheckedTransformer(activations, CLI::ignore_case));
  cmd->add_option("--batch-size", cfg.batch_size, "examples per batch");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--seed", cfg.seeds, "run seeds (repeatable)");
  cmd->add_option("--workers,-w", cfg.workers, "data-parallel worker lanes");
  cmd->add_option("--eval-every", cfg.eval_every,
                  "forward-backward passes between evaluations "
                  "(0 = once per epoch)");
  cmd->add_flag("--shuffle,!--no-shuffle", cfg.shuffle,
                "pre-permute the dataset before slicing into batches");
  cmd->add_option("--out", cfg.out_dir, "output directory for CSV files");

  cmd->add_option("--lr", cfg.opt.base_lr, "constant learning rate");
  cmd->add_option("--lr-schedule", schedule_text,
                  "average-loss tiers THRESHOLD:LR[,THRESHOLD:LR...]");
  cmd->add_option("--variant", cfg.opt.variant, "update rule")
      ->transform(CLI::CheckedTransformer(variants, CLI::ignore_case));
  cmd->add_option("--momentum", cfg.opt.momentum, "momentum coefficient");
  cmd->add_option("--weight-decay", cfg.opt.weight_decay, "L2 penalty weight");
  cmd->add_option("--sigma-k", cfg.opt.sigma_multiplier,
                  "control-limit multiplier k (inf disables detection)");
  cmd->add_option("--stop", cfg.opt.stop, "max subproblem iterations");
  cmd->add_option("--epsilon", cfg.opt.epsilon,
                  "proximal weight of the subproblem");
  cmd->add_option("--subproblem-lr", cfg.opt.subproblem_lr,
                  "subproblem step size (0 = follow the schedule)");

  cmd->set_config("--config", "", "flat key=value config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inconsistent stochastic gradient descent experiments"};
  app.require_subcommand(1);

  isgd::ExperimentConfig cfg;
  std::string schedule_text;

  CLI::App* train_cmd =
      app.add_subcommand("train", "paired SGD vs ISGD training runs");
  add_dataset_options(train_cmd, cfg);
  add_training_options(train_cmd, cfg, schedule_text);

  CLI::App* dyn_cmd = app.add_subcommand(
      "batch-dynamics", "loss traces of fixed single-class or i.i.d. batches");
  const std::map<std::string, isgd::BatchScenario> scenarios{
      {"iid", isgd::BatchScenario::iid},
      {"single-class", isgd::BatchScenario::single_class}};
  dyn_cmd->add_option("--scenario", cfg.scenario, "batch construction mode")
      ->transform(CLI::CheckedTransformer(scenarios, CLI::ignore_case));
  add_dataset_options(dyn_cmd, cfg);
  add_training_options(dyn_cmd, cfg, schedule_text);

  CLI::App* model_cmd = app.add_subcommand(
      "batch-model", "predicted time-to-loss over a batch-size range");
  isgd::SystemModel sys;
  double target_loss = 0.1;
  long lo = 1, hi = 3000;
  std::string model_out = ".";
  model_cmd->add_option("--c1", sys.throughput,
                        "system throughput, examples/second")
      ->required();
  model_cmd->add_option("--c2", sys.sync_cost,
                        "synchronization seconds per iteration")
      ->required();
  model_cmd->add_option("--target-loss", target_loss, "loss to reach");
  model_cmd->add_option("--min-batch", lo, "range lower bound");
  model_cmd->add_option("--max-batch", hi, "range upper bound");
  model_cmd->add_option("--out", model_out, "output directory");
  model_cmd->set_config("--config", "", "flat key=value config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!schedule_text.empty()) {
      cfg.opt.lr_schedule = parse_schedule(schedule_text);
    }
    if (train_cmd->parsed()) {
      const auto runs = isgd::run_train_experiment(cfg, true);
      for (const auto& run : runs) {
        std::printf("seed %llu: sgd passes=%llu avg_loss=%.6f | "
                    "isgd passes=%llu avg_loss=%.6f subproblem=%llu\n",
                    static_cast<unsigned long long>(run.seed),
                    static_cast<unsigned long long>(run.sgd.total_passes),
                    run.sgd.final_avg_loss,
                    static_cast<unsigned long long>(run.isgd.total_passes),
                    run.isgd.final_avg_loss,
                    static_cast<unsigned long long>(run.isgd.subproblem_passes));
      }
      std::printf("wrote CSVs to %s\n", cfg.out_dir.c_str());
    } else if (dyn_cmd->parsed()) {
      isgd::run_batch_dynamics(cfg, true);
      std::printf("wrote %s/batch_dynamics_%s.csv\n", cfg.out_dir.c_str(),
                  isgd::scenario_name(cfg.scenario).c_str());
    } else if (model_cmd->parsed()) {
      const auto best =
          isgd::run_batch_model(sys, target_loss, lo, hi, model_out, true);
      std::printf("optimal batch %ld, predicted %.6f s (wrote "
                  "%s/batch_model.csv)\n",
                  best.batch, best.seconds, model_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
