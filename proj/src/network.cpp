#include "isgd/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "isgd/common.hpp"

namespace isgd {

namespace {

struct LayerView {
  std::size_t w_off;  // weights, row-major [out][in]
  std::size_t b_off;
  int in;
  int out;
};

std::vector<LayerView> layout(const NetworkSpec& spec) {
  std::vector<LayerView> layers;
  std::size_t off = 0;
  for (std::size_t l = 1; l < spec.layer_sizes.size(); ++l) {
    LayerView v;
    v.in = spec.layer_sizes[l - 1];
    v.out = spec.layer_sizes[l];
    v.w_off = off;
    off += static_cast<std::size_t>(v.out) * v.in;
    v.b_off = off;
    off += static_cast<std::size_t>(v.out);
    layers.push_back(v);
  }
  return layers;
}

double activate(double z, Activation a) {
  return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_deriv(double z, double a_of_z, Activation a) {
  return a == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - a_of_z * a_of_z;
}

// Forward pass for one example; fills pre-activations and activations per
// layer. act.back() holds the raw logits.
void forward_example(const ParameterVector& w,
                     const std::vector<LayerView>& layers,
                     const NetworkSpec& spec, std::span<const double> x,
                     std::vector<std::vector<double>>& pre,
                     std::vector<std::vector<double>>& act) {
  const double* input = x.data();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerView& lv = layers[l];
    const bool output_layer = (l + 1 == layers.size());
    for (int j = 0; j < lv.out; ++j) {
      const double* row = w.values.data() + lv.w_off +
                          static_cast<std::size_t>(j) * lv.in;
      double z = w.values[lv.b_off + j];
      for (int k = 0; k < lv.in; ++k) {
        z += row[k] * input[k];
      }
      pre[l][j] = z;
      act[l][j] = output_layer ? z : activate(z, spec.activation);
    }
    input = act[l].data();
  }
}

// Stable softmax cross-entropy of logits against a one-hot label.
double softmax_loss(const std::vector<double>& logits, int label,
                    std::vector<double>& probs) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum_exp = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    probs[j] = std::exp(logits[j] - m);
    sum_exp += probs[j];
  }
  for (double& p : probs) {
    p /= sum_exp;
  }
  return std::log(sum_exp) + m - logits[label];
}

void check_batch(const Batch& batch, const NetworkSpec& spec) {
  if (batch.data == nullptr || batch.count == 0) {
    throw std::invalid_argument("forward_backward: empty batch");
  }
  if (batch.data->dim != spec.input_dim()) {
    throw std::invalid_argument("forward_backward: feature dim " +
                                std::to_string(batch.data->dim) +
                                " does not match network input " +
                                std::to_string(spec.input_dim()));
  }
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("network needs at least input and output sizes");
  }
  for (int s : layer_sizes) {
    if (s <= 0) {
      throw std::invalid_argument("layer sizes must be positive");
    }
  }
  if (layer_sizes.back() < 2) {
    throw std::invalid_argument("output layer needs at least 2 classes");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("weight decay must be nonnegative");
  }
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    n += static_cast<std::size_t>(layer_sizes[l]) * (layer_sizes[l - 1] + 1);
  }
  return n;
}

double ParameterVector::squared_norm() const {
  double s = 0.0;
  for (double v : values) {
    s += v * v;
  }
  return s;
}

bool ParameterVector::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

ParameterVector init_network(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParameterVector w(spec.parameter_count());
  std::mt19937_64 rng(seed);
  for (const LayerView& lv : layout(spec)) {
    const double a = std::sqrt(6.0 / (lv.in + lv.out));
    std::uniform_real_distribution<double> dist(-a, a);
    const std::size_t n = static_cast<std::size_t>(lv.out) * lv.in;
    for (std::size_t i = 0; i < n; ++i) {
      w.values[lv.w_off + i] = dist(rng);
    }
    // biases stay zero
  }
  return w;
}

namespace detail {

DataPass data_pass(const ParameterVector& w, const Dataset& ds,
                   std::size_t offset, std::size_t count,
                   const NetworkSpec& spec) {
  const std::vector<LayerView> layers = layout(spec);
  const std::size_t n_w = spec.parameter_count();
  const int classes = spec.class_count();

  DataPass out;
  out.grad_sum.assign(n_w, 0.0);
  std::vector<double> comp(n_w, 0.0);
  CompensatedSum loss_acc;

  std::vector<std::vector<double>> pre(layers.size()), act(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre[l].resize(layers[l].out);
    act[l].resize(layers[l].out);
  }
  int max_width = 0;
  for (const LayerView& lv : layers) {
    max_width = std::max(max_width, std::max(lv.in, lv.out));
  }
  std::vector<double> probs(classes);
  std::vector<double> delta(max_width), delta_prev(max_width);
  std::vector<double> g(n_w);

  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t row = offset + i;
    const int label = ds.labels[row];
    if (label < 0 || label >= classes) {
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " outside [0, " + std::to_string(classes) +
                                  ")");
    }

    forward_example(w, layers, spec, ds.row(row), pre, act);
    loss_acc.add(softmax_loss(act.back(), label, probs));

    for (int j = 0; j < classes; ++j) {
      delta[j] = probs[j] - (j == label ? 1.0 : 0.0);
    }
    for (std::size_t l = layers.size(); l-- > 0;) {
      const LayerView& lv = layers[l];
      const double* input =
          l == 0 ? ds.row(row).data() : act[l - 1].data();
      for (int j = 0; j < lv.out; ++j) {
        double* grow = g.data() + lv.w_off + static_cast<std::size_t>(j) * lv.in;
        const double d = delta[j];
        for (int k = 0; k < lv.in; ++k) {
          grow[k] = d * input[k];
        }
        g[lv.b_off + j] = d;
      }
      if (l > 0) {
        const LayerView& below = layers[l - 1];
        for (int k = 0; k < lv.in; ++k) {
          double s = 0.0;
          for (int j = 0; j < lv.out; ++j) {
            s += delta[j] * w.values[lv.w_off + static_cast<std::size_t>(j) * lv.in + k];
          }
          delta_prev[k] =
              s * activate_deriv(pre[l - 1][k], act[l - 1][k], spec.activation);
        }
        std::swap(delta, delta_prev);
      }
    }
    for (std::size_t p = 0; p < n_w; ++p) {
      compensated_add(out.grad_sum[p], comp[p], g[p]);
    }
  }

  out.loss_sum = loss_acc.value();
  for (std::size_t p = 0; p < n_w; ++p) {
    out.grad_sum[p] += comp[p];
  }
  return out;
}

LossAndGrad finalize(const DataPass& pass, std::size_t n_b,
                     const ParameterVector& w, const NetworkSpec& spec) {
  const double lambda = spec.weight_decay;
  const double decay = 0.5 * lambda * w.squared_norm();
  const double inv = 1.0 / static_cast<double>(n_b);

  LossAndGrad out;
  out.loss = pass.loss_sum * inv + decay;
  out.loss_sum = pass.loss_sum + decay;
  out.grad = ParameterVector(w.size());
  for (std::size_t p = 0; p < w.size(); ++p) {
    out.grad[p] = pass.grad_sum[p] * inv + lambda * w.values[p];
  }
  if (!std::isfinite(out.loss) || !out.grad.all_finite()) {
    throw DivergenceError("non-finite loss or gradient in forward/backward");
  }
  return out;
}

}  // namespace detail

LossAndGrad forward_backward(const ParameterVector& w, const Batch& batch,
                             const NetworkSpec& spec) {
  check_batch(batch, spec);
  if (w.size() != spec.parameter_count()) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  return detail::finalize(
      detail::data_pass(w, *batch.data, batch.offset, batch.count, spec),
      batch.count, w, spec);
}

double batch_loss(const ParameterVector& w, const Batch& batch,
                  const NetworkSpec& spec) {
  check_batch(batch, spec);
  const std::vector<LayerView> layers = layout(spec);
  std::vector<std::vector<double>> pre(layers.size()), act(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre[l].resize(layers[l].out);
    act[l].resize(layers[l].out);
  }
  std::vector<double> probs(spec.class_count());
  CompensatedSum acc;
  for (std::size_t i = 0; i < batch.count; ++i) {
    const std::size_t row = batch.offset + i;
    forward_example(w, layers, spec, batch.data->row(row), pre, act);
    acc.add(softmax_loss(act.back(), batch.data->labels[row], probs));
  }
  const double loss =
      acc.value() / static_cast<double>(batch.count) +
      0.5 * spec.weight_decay * w.squared_norm();
  if (!std::isfinite(loss)) {
    throw DivergenceError("non-finite loss in forward pass");
  }
  return loss;
}

double accuracy(const ParameterVector& w, const Dataset& ds,
                const NetworkSpec& spec) {
  if (ds.size() == 0) {
    throw std::invalid_argument("accuracy: empty dataset");
  }
  const std::vector<LayerView> layers = layout(spec);
  std::vector<std::vector<double>> pre(layers.size()), act(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre[l].resize(layers[l].out);
    act[l].resize(layers[l].out);
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    forward_example(w, layers, spec, ds.row(i), pre, act);
    const auto& logits = act.back();
    const int pred = static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (pred == ds.labels[i]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

}  // namespace isgd
