#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "isgd/dataset.hpp"
#include "isgd/network.hpp"
#include "isgd/optimizer.hpp"
#include "isgd/time_model.hpp"

namespace isgd {

enum class DatasetKind { synthetic, mnist };

// Everything a paired SGD-vs-ISGD experiment needs. Populated from a flat
// key=value config file plus command-line overrides by the CLI; tests fill
// it directly.
struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::synthetic;

  // synthetic generator
  int classes = 10;
  int per_class = 1000;
  int dim = 32;
  double spread = 2.5;
  std::uint64_t dataset_seed = 42;
  double holdout_fraction = 0.1;

  // mnist paths
  std::string mnist_images;
  std::string mnist_labels;
  std::string mnist_test_images;
  std::string mnist_test_labels;

  std::vector<int> hidden = {32};
  Activation activation = Activation::relu;

  OptimizerConfig opt;
  std::size_t batch_size = 500;
  int epochs = 20;
  std::vector<std::uint64_t> seeds = {1};
  int workers = 1;
  std::uint64_t eval_every = 0;  // 0 = once per epoch

  // Pre-permute before slicing into fixed batches. Off by default for the
  // synthetic benchmark: the generator groups examples by class, so unshuffled
  // slices give the strongly sampling-biased batches the method targets.
  bool shuffle = false;

  BatchScenario scenario = BatchScenario::iid;  // batch-dynamics only

  std::string out_dir = ".";

  void validate() const;
};

struct PairedRun {
  std::uint64_t seed = 0;
  TrainingReport sgd;
  TrainingReport isgd;
};

// Builds the configured dataset (plus its held-out set when available).
std::pair<Dataset, Dataset> build_dataset(const ExperimentConfig& cfg);

NetworkSpec build_network_spec(const ExperimentConfig& cfg, int input_dim,
                               int classes);

// Runs the single-factor comparison: for every seed, one SGD run and one
// ISGD run sharing the initial weights, permutation, learning rates and
// batch layout. When write_csv is set, each run lands in
// <out_dir>/{sgd,isgd}_seed<seed>.csv.
std::vector<PairedRun> run_train_experiment(const ExperimentConfig& cfg,
                                            bool write_csv);

// Single-class / i.i.d. batch construction and a plain-SGD run over the
// fixed batches; emits per-batch loss traces by epoch to
// <out_dir>/batch_dynamics_<scenario>.csv when write_csv is set.
TrainingReport run_batch_dynamics(const ExperimentConfig& cfg, bool write_csv);

// Predicted-time sweep over a batch-size range; returns the argmin row and
// optionally writes <out_dir>/batch_model.csv (sweep rows then the argmin
// row again at the end).
BatchSearchResult run_batch_model(const SystemModel& sys, double target_loss,
                                  long lo, long hi, const std::string& out_dir,
                                  bool write_csv);

// CSV helpers shared by the commands; UTF-8, LF line endings, '.' decimal
// separator, fixed column order.
void write_run_csv(const std::string& path, const TrainingReport& report);
void write_dynamics_csv(const std::string& path, const TrainingReport& report);

std::string variant_name(Variant v);
std::string scenario_name(BatchScenario s);

}  // namespace isgd
