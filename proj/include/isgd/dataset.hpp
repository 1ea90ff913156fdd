#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace isgd {

// Row-major feature matrix plus integer labels. Immutable once built;
// batches and worker shards only ever read from it.
struct Dataset {
  std::vector<double> features;  // size() == count * dim
  std::vector<int> labels;       // size() == count
  int dim = 0;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  void validate() const;
};

// Contiguous slice of a dataset; batch `index` is the ordinal within the
// fixed cycle. Batches never own data.
struct Batch {
  const Dataset* data = nullptr;
  std::size_t offset = 0;
  std::size_t count = 0;
  std::size_t index = 0;

  std::size_t size() const { return count; }
  std::span<const double> features(std::size_t i) const {
    return data->row(offset + i);
  }
  int label(std::size_t i) const { return data->labels[offset + i]; }
};

// Deterministic full shuffle; the cycle then walks fixed slices of the
// permuted order.
Dataset permute_dataset(const Dataset& ds, std::uint64_t seed);

// Number of whole batches; a trailing partial batch is dropped.
std::size_t batch_count(std::size_t n_d, std::size_t n_b);

// Batch ordinal assigned to iteration j: j mod (n_d / n_b).
std::size_t fcpr_index(std::uint64_t j, std::size_t n_d, std::size_t n_b);

// The t-th fixed-cycle slice of `ds`.
Batch batch_at(const Dataset& ds, std::size_t n_b, std::size_t t);

// MNIST/EMNIST-style IDX pair. Pixels are scaled to [0, 1].
Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path);

// Gaussian clusters with one mean per class, grouped by class in the
// returned order. spread = 0 collapses each class onto its mean.
Dataset synth_gaussian(int classes, int per_class, int dim, double spread,
                       std::uint64_t seed);

// Moves the last `fraction` of every class into a held-out set. Assumes
// nothing about ordering beyond labels being valid.
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction);

// Orderings for the controlled batch-dynamics experiments: either every
// batch is drawn from a single class, or every batch holds an equal count
// of each class in fixed class order.
enum class BatchScenario { iid, single_class };

Dataset arrange_scenario(const Dataset& ds, BatchScenario scenario,
                         std::size_t n_b, std::uint64_t seed);

}  // namespace isgd
