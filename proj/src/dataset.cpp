#include "isgd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "isgd/common.hpp"

namespace isgd {

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& order) {
  Dataset out;
  out.dim = ds.dim;
  out.num_classes = ds.num_classes;
  out.features.reserve(order.size() * static_cast<std::size_t>(ds.dim));
  out.labels.reserve(order.size());
  for (std::size_t idx : order) {
    auto row = ds.row(idx);
    out.features.insert(out.features.end(), row.begin(), row.end());
    out.labels.push_back(ds.labels[idx]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& ds) {
  std::vector<std::vector<std::size_t>> groups(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    groups[ds.labels[i]].push_back(i);
  }
  return groups;
}

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw std::runtime_error("truncated IDX file: " + path);
  }
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

void Dataset::validate() const {
  if (features.size() != size() * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("feature matrix and label count disagree");
  }
  for (int l : labels) {
    if (l < 0 || l >= num_classes) {
      throw std::invalid_argument("label outside [0, num_classes)");
    }
  }
}

Dataset permute_dataset(const Dataset& ds, std::uint64_t seed) {
  if (ds.size() == 0) {
    throw std::invalid_argument("cannot permute an empty dataset");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return take_rows(ds, order);
}

std::size_t batch_count(std::size_t n_d, std::size_t n_b) {
  if (n_b == 0) {
    throw std::invalid_argument("batch size must be positive");
  }
  return n_d / n_b;
}

std::size_t fcpr_index(std::uint64_t j, std::size_t n_d, std::size_t n_b) {
  const std::size_t n = batch_count(n_d, n_b);
  if (n == 0) {
    throw std::invalid_argument("batch size exceeds dataset size");
  }
  return static_cast<std::size_t>(j % n);
}

Batch batch_at(const Dataset& ds, std::size_t n_b, std::size_t t) {
  const std::size_t n = batch_count(ds.size(), n_b);
  if (t >= n) {
    throw std::out_of_range("batch ordinal outside the cycle");
  }
  return Batch{&ds, t * n_b, n_b, t};
}

Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) {
    throw std::runtime_error("cannot open " + images_path);
  }
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) {
    throw std::runtime_error("cannot open " + labels_path);
  }

  if (read_u32_be(img, images_path) != 0x00000803u) {
    throw std::runtime_error("bad image magic in " + images_path);
  }
  if (read_u32_be(lab, labels_path) != 0x00000801u) {
    throw std::runtime_error("bad label magic in " + labels_path);
  }

  const std::uint32_t n_img = read_u32_be(img, images_path);
  const std::uint32_t rows = read_u32_be(img, images_path);
  const std::uint32_t cols = read_u32_be(img, images_path);
  const std::uint32_t n_lab = read_u32_be(lab, labels_path);
  if (n_img != n_lab) {
    throw std::runtime_error("image/label count mismatch: " +
                             std::to_string(n_img) + " vs " +
                             std::to_string(n_lab));
  }

  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  Dataset ds;
  ds.dim = static_cast<int>(dim);
  ds.num_classes = 10;
  ds.features.resize(static_cast<std::size_t>(n_img) * dim);
  ds.labels.resize(n_img);

  std::vector<unsigned char> buf(dim);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()),
                  static_cast<std::streamsize>(dim))) {
      throw std::runtime_error("truncated IDX file: " + images_path);
    }
    double* out = ds.features.data() + static_cast<std::size_t>(i) * dim;
    for (std::size_t p = 0; p < dim; ++p) {
      out[p] = buf[p] / 255.0;
    }
  }
  for (std::uint32_t i = 0; i < n_lab; ++i) {
    unsigned char l;
    if (!lab.read(reinterpret_cast<char*>(&l), 1)) {
      throw std::runtime_error("truncated IDX file: " + labels_path);
    }
    if (l > 9) {
      throw std::runtime_error("label byte outside 0..9 in " + labels_path);
    }
    ds.labels[i] = l;
  }
  return ds;
}

Dataset synth_gaussian(int classes, int per_class, int dim, double spread,
                       std::uint64_t seed) {
  if (classes < 2) {
    throw std::invalid_argument("need at least 2 classes");
  }
  if (per_class < 1 || dim < 1) {
    throw std::invalid_argument("per_class and dim must be positive");
  }
  if (spread < 0.0) {
    throw std::invalid_argument("spread must be nonnegative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<double> means(static_cast<std::size_t>(classes) * dim);
  for (double& m : means) {
    m = unit(rng);
  }

  Dataset ds;
  ds.dim = dim;
  ds.num_classes = classes;
  ds.features.resize(static_cast<std::size_t>(classes) * per_class * dim);
  ds.labels.resize(static_cast<std::size_t>(classes) * per_class);

  std::size_t row = 0;
  for (int c = 0; c < classes; ++c) {
    const double* mean = means.data() + static_cast<std::size_t>(c) * dim;
    for (int i = 0; i < per_class; ++i, ++row) {
      double* out = ds.features.data() + row * static_cast<std::size_t>(dim);
      for (int d = 0; d < dim; ++d) {
        out[d] = mean[d] + spread * unit(rng);
      }
      ds.labels[row] = c;
    }
  }
  return ds;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0) {
    throw std::invalid_argument("holdout fraction must be in [0, 1)");
  }
  std::vector<std::size_t> train_idx, hold_idx;
  for (const auto& group : indices_by_class(ds)) {
    const std::size_t hold =
        static_cast<std::size_t>(std::llround(group.size() * fraction));
    const std::size_t keep = group.size() - hold;
    train_idx.insert(train_idx.end(), group.begin(), group.begin() + keep);
    hold_idx.insert(hold_idx.end(), group.begin() + keep, group.end());
  }
  return {take_rows(ds, train_idx), take_rows(ds, hold_idx)};
}

Dataset arrange_scenario(const Dataset& ds, BatchScenario scenario,
                         std::size_t n_b, std::uint64_t seed) {
  if (n_b == 0 || n_b > ds.size()) {
    throw std::invalid_argument("invalid batch size for scenario");
  }
  std::mt19937_64 rng(seed);
  auto groups = indices_by_class(ds);
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
  }

  std::vector<std::size_t> order;
  order.reserve(ds.size());

  if (scenario == BatchScenario::single_class) {
    for (const auto& g : groups) {
      if (g.size() % n_b != 0) {
        throw std::invalid_argument(
            "single-class batches need the batch size to divide every "
            "class count");
      }
      order.insert(order.end(), g.begin(), g.end());
    }
  } else {
    const std::size_t classes = groups.size();
    if (n_b % classes != 0) {
      throw std::invalid_argument(
        "i.i.d. batches need the batch size to be a multiple of the class "
        "count");
    }
    const std::size_t quota = n_b / classes;
    std::size_t batches = SIZE_MAX;
    for (const auto& g : groups) {
      batches = std::min(batches, g.size() / quota);
    }
    if (batches == 0) {
      throw std::invalid_argument("not enough examples per class");
    }
    // fixed class order inside every batch
    for (std::size_t b = 0; b < batches; ++b) {
      for (const auto& g : groups) {
        for (std::size_t q = 0; q < quota; ++q) {
          order.push_back(g[b * quota + q]);
        }
      }
    }
  }
  return take_rows(ds, order);
}

}  // namespace isgd
