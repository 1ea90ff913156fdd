#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "isgd/common.hpp"
#include "isgd/network.hpp"
#include "oracles.hpp"

using namespace isgd;

namespace {

Dataset random_dataset(int n, int dim, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> feat(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, classes - 1);
  Dataset ds;
  ds.dim = dim;
  ds.num_classes = classes;
  ds.features.resize(static_cast<std::size_t>(n) * dim);
  ds.labels.resize(n);
  for (auto& f : ds.features) {
    f = feat(rng);
  }
  for (auto& l : ds.labels) {
    l = lab(rng);
  }
  return ds;
}

Batch whole(const Dataset& ds) { return Batch{&ds, 0, ds.size(), 0}; }

}  // namespace

TEST_CASE("init_network is deterministic per seed") {
  NetworkSpec spec;
  spec.layer_sizes = {4, 6, 3};
  const ParameterVector a = init_network(spec, 11);
  const ParameterVector b = init_network(spec, 11);
  REQUIRE(a.size() == spec.parameter_count());
  CHECK(a.values == b.values);

  const ParameterVector c = init_network(spec, 12);
  CHECK(a.values != c.values);
}

TEST_CASE("init_network keeps weights bounded and biases zero") {
  NetworkSpec spec;
  spec.layer_sizes = {8, 5, 2};
  const ParameterVector w = init_network(spec, 3);
  const double bound1 = std::sqrt(6.0 / (8 + 5));
  for (std::size_t i = 0; i < 8 * 5; ++i) {
    CHECK(std::abs(w[i]) <= bound1);
  }
  for (std::size_t i = 8 * 5; i < 8 * 5 + 5; ++i) {
    CHECK(w[i] == 0.0);
  }
}

TEST_CASE("degenerate specs are rejected") {
  NetworkSpec spec;
  spec.layer_sizes = {4};
  CHECK_THROWS_AS(init_network(spec, 0), std::invalid_argument);

  spec.layer_sizes = {4, 1};  // single output class
  CHECK_THROWS_AS(init_network(spec, 0), std::invalid_argument);

  spec.layer_sizes = {4, 0, 2};
  CHECK_THROWS_AS(init_network(spec, 0), std::invalid_argument);
}

TEST_CASE("zero-weight two-class model scores ln 2 per example") {
  NetworkSpec spec;
  spec.layer_sizes = {5, 2};
  spec.weight_decay = 0.0;
  const Dataset ds = random_dataset(16, 5, 2, 21);
  const ParameterVector w(spec.parameter_count());

  const LossAndGrad out = forward_backward(w, whole(ds), spec);
  CHECK(out.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(out.loss_sum == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss collapses to the decay term when predictions are confident") {
  // drive the true-class logit with a huge bias so softmax is ~one-hot
  NetworkSpec spec;
  spec.layer_sizes = {2, 2};
  spec.weight_decay = 1e-3;
  Dataset ds;
  ds.dim = 2;
  ds.num_classes = 2;
  ds.features = {0.0, 0.0, 0.0, 0.0};
  ds.labels = {1, 1};

  ParameterVector w(spec.parameter_count());
  w[spec.parameter_count() - 1] = 50.0;  // bias of class 1
  const LossAndGrad out = forward_backward(w, whole(ds), spec);
  const double decay = 0.5 * spec.weight_decay * w.squared_norm();
  CHECK(out.loss == doctest::Approx(decay).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches central finite differences") {
  NetworkSpec spec;
  spec.layer_sizes = {6, 8, 4};
  spec.weight_decay = 1e-4;
  const Dataset ds = random_dataset(12, 6, 4, 31);
  const ParameterVector w = init_network(spec, 5);
  const LossAndGrad out = forward_backward(w, whole(ds), spec);

  auto f = [&](const ParameterVector& x) {
    return batch_loss(x, whole(ds), spec);
  };
  std::vector<std::size_t> coords(w.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  std::mt19937_64 rng(7);
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(50);

  CHECK(oracle::max_grad_error(f, w, out.grad, coords) < 1e-5);
}

TEST_CASE("tanh network gradient also checks out") {
  NetworkSpec spec;
  spec.layer_sizes = {3, 5, 5, 2};
  spec.activation = Activation::tanh;
  spec.weight_decay = 5e-4;
  const Dataset ds = random_dataset(8, 3, 2, 41);
  const ParameterVector w = init_network(spec, 13);
  const LossAndGrad out = forward_backward(w, whole(ds), spec);

  auto f = [&](const ParameterVector& x) {
    return batch_loss(x, whole(ds), spec);
  };
  std::vector<std::size_t> coords(w.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  CHECK(oracle::max_grad_error(f, w, out.grad, coords) < 1e-5);
}

TEST_CASE("weight decay separates from the data term") {
  NetworkSpec with = {{5, 7, 3}, Activation::relu, 2e-3};
  NetworkSpec without = with;
  without.weight_decay = 0.0;
  const Dataset ds = random_dataset(10, 5, 3, 51);
  const ParameterVector w = init_network(with, 2);

  const double l1 = forward_backward(w, whole(ds), with).loss;
  const double l0 = forward_backward(w, whole(ds), without).loss;
  CHECK(l1 - l0 ==
        doctest::Approx(0.5 * with.weight_decay * w.squared_norm())
            .epsilon(1e-12));
}

TEST_CASE("shuffling examples inside a batch leaves loss and grad put") {
  NetworkSpec spec;
  spec.layer_sizes = {4, 6, 3};
  const Dataset ds = random_dataset(64, 4, 3, 61);
  const ParameterVector w = init_network(spec, 17);
  const LossAndGrad base = forward_backward(w, whole(ds), spec);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    Dataset shuffled = permute_dataset(ds, rng());
    const LossAndGrad other = forward_backward(w, whole(shuffled), spec);
    CHECK(std::abs(other.loss - base.loss) < 1e-12);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      worst = std::max(worst, std::abs(other.grad[i] - base.grad[i]));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("dimension mismatch and bad labels are rejected") {
  NetworkSpec spec;
  spec.layer_sizes = {4, 3};
  const ParameterVector w = init_network(spec, 1);

  Dataset narrow = random_dataset(4, 3, 3, 71);
  CHECK_THROWS_AS(forward_backward(w, whole(narrow), spec),
                  std::invalid_argument);

  Dataset bad = random_dataset(4, 4, 3, 72);
  bad.labels[2] = 3;  // outside [0, 3)
  CHECK_THROWS_AS(forward_backward(w, whole(bad), spec),
                  std::invalid_argument);

  Batch empty;
  CHECK_THROWS_AS(forward_backward(w, empty, spec), std::invalid_argument);
}

TEST_CASE("non-finite weights surface as divergence") {
  NetworkSpec spec;
  spec.layer_sizes = {4, 3};
  const Dataset ds = random_dataset(4, 4, 3, 81);
  ParameterVector w = init_network(spec, 1);
  w[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward_backward(w, whole(ds), spec), DivergenceError);
}

TEST_CASE("accuracy counts argmax hits") {
  NetworkSpec spec;
  spec.layer_sizes = {2, 2};
  spec.weight_decay = 0.0;
  Dataset ds;
  ds.dim = 2;
  ds.num_classes = 2;
  ds.features = {1.0, 0.0, -1.0, 0.0, 1.0, 0.0};
  ds.labels = {1, 0, 0};

  ParameterVector w(spec.parameter_count());
  w[2] = 5.0;  // class-1 weight on feature 0: predicts 1 for x0 > 0
  CHECK(accuracy(w, ds, spec) == doctest::Approx(2.0 / 3.0));
}
