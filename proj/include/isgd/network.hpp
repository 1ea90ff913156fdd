#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "isgd/dataset.hpp"

namespace isgd {

enum class Activation { relu, tanh };

// Dense feed-forward classifier: input, zero or more hidden layers, and a
// softmax cross-entropy output layer. Weight decay is part of the loss.
struct NetworkSpec {
  std::vector<int> layer_sizes;  // input dim, hidden dims..., class count
  Activation activation = Activation::relu;
  double weight_decay = 1e-4;

  int input_dim() const { return layer_sizes.front(); }
  int class_count() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
  void validate() const;
};

// Flat weight/gradient container covering every layer of the network.
struct ParameterVector {
  std::vector<double> values;

  ParameterVector() = default;
  explicit ParameterVector(std::size_t n) : values(n, 0.0) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  const double& operator[](std::size_t i) const { return values[i]; }

  double squared_norm() const;
  bool all_finite() const;
};

struct LossAndGrad {
  double loss = 0.0;      // per-example mean data loss + weight-decay term
  double loss_sum = 0.0;  // batch-summed data loss + weight-decay term
  ParameterVector grad;   // exact gradient of `loss` w.r.t. the weights
};

// Scaled-uniform weight init, zero biases. Identical (spec, seed) pairs
// produce identical vectors.
ParameterVector init_network(const NetworkSpec& spec, std::uint64_t seed);

// One forward/backward pass over a batch. Throws DivergenceError when the
// loss or gradient turns non-finite.
LossAndGrad forward_backward(const ParameterVector& w, const Batch& batch,
                             const NetworkSpec& spec);

// Forward-only mean loss (weight decay included).
double batch_loss(const ParameterVector& w, const Batch& batch,
                  const NetworkSpec& spec);

// Fraction of examples whose argmax prediction matches the label.
double accuracy(const ParameterVector& w, const Dataset& ds,
                const NetworkSpec& spec);

namespace detail {

// Data term of a pass over dataset rows [offset, offset+count): summed
// per-example losses and gradient, no weight decay, no normalization.
// Cross-example accumulation is compensated so the result is insensitive
// to example order.
struct DataPass {
  double loss_sum = 0.0;
  std::vector<double> grad_sum;
};

DataPass data_pass(const ParameterVector& w, const Dataset& ds,
                   std::size_t offset, std::size_t count,
                   const NetworkSpec& spec);

// Mean-normalizes the data term and adds the weight-decay term once.
LossAndGrad finalize(const DataPass& pass, std::size_t n_b,
                     const ParameterVector& w, const NetworkSpec& spec);

}  // namespace detail

}  // namespace isgd
