// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace mlal::nn {

inline constexpr double kProbClamp = 1e-7;

/// Row-major dense matrix; `rows` is the output width of a layer.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

struct DenseLayer {
  Matrix weight;
  std::vector<double> bias;

  std::size_t in_dim() const { return weight.cols; }
  std::size_t out_dim() const { return weight.rows; }
  bool operator==(const DenseLayer&) const = default;
};

/// Loss-prediction head: penultimate h -> fc1 -> ReLU -> fc2 -> scalar.
struct LossHeadParams {
  DenseLayer fc1;
  DenseLayer fc2;
  bool operator==(const LossHeadParams&) const = default;
};

/// Classifier layers d -> h_1 -> ... -> h_L -> C with ReLU on hidden layers
/// and a sigmoid output, plus the optional loss-prediction head.
struct NetworkParams {
  std::vector<DenseLayer> layers;
  std::optional<LossHeadParams> head;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t num_classes() const { return layers.back().out_dim(); }
  std::size_t penultimate_dim() const { return layers.back().in_dim(); }
  std::size_t parameter_count() const;
  bool operator==(const NetworkParams&) const = default;
};

struct Architecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t num_classes = 0;
  /// Width k of the head's hidden layer; 0 builds no head.
  std::size_t head_hidden = 16;
};

/// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
NetworkParams init_network(const Architecture& arch, Rng& rng);

NetworkParams zeros_like(const NetworkParams& params);

/// Throws kInvalidArgument if layer shapes do not chain or any entry is not finite.
void validate(const NetworkParams& params);

/// Calls fn(param, other_param) over every scalar pair of two identically shaped networks.
template <class A, class B, class Fn>
void zip_parameters(A& a, B& b, Fn&& fn) {
  auto zip_layer = [&](auto& la, auto& lb) {
    for (std::size_t i = 0; i < la.weight.data.size(); ++i) fn(la.weight.data[i], lb.weight.data[i]);
    for (std::size_t i = 0; i < la.bias.size(); ++i) fn(la.bias[i], lb.bias[i]);
  };
  for (std::size_t l = 0; l < a.layers.size(); ++l) zip_layer(a.layers[l], b.layers[l]);
  if (a.head && b.head) {
    zip_layer(a.head->fc1, b.head->fc1);
    zip_layer(a.head->fc2, b.head->fc2);
  }
}

struct ForwardTrace {
  /// activations[0] is the input; activations[l + 1] is the output of layer l
  /// (ReLU for hidden layers, sigmoid probabilities for the last).
  std::vector<std::vector<double>> activations;
  /// pre_activations[l] is the affine output of layer l.
  std::vector<std::vector<double>> pre_activations;
  std::vector<double> head_pre;
  std::vector<double> head_hidden;
  std::optional<double> head_value;

  std::span<const double> penultimate() const { return activations[activations.size() - 2]; }
  std::span<const double> probs() const { return activations.back(); }
};

ForwardTrace forward(const NetworkParams& params, std::span<const double> x, bool with_head);

/// Probability vector only; no trace bookkeeping.
std::vector<double> predict(const NetworkParams& params, std::span<const double> x);

/// Binary cross entropy summed over classes, with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels);

/// max(0, -sign(l_j - l_k) (lhat_j - lhat_k) + margin) with sign(0) = +1.
double ranking_loss(double loss_j, double loss_k, double pred_j, double pred_k, double margin);

struct RankingPairTerm {
  double loss_j = 0.0;
  double loss_k = 0.0;
  double pred_j = 0.0;
  double pred_k = 0.0;
};

/// mean(batch_losses) + lambda * (2 / |B|) * sum of pair ranking losses.
/// Requires pairs.size() == |B| / 2.
double joint_loss(std::span<const double> batch_losses, std::span<const RankingPairTerm> pairs,
                  double lambda, double margin);

/// Upstream derivatives for one sample of the joint objective.
struct SampleLossWeights {
  double bce = 0.0;   // dL / d l_i
  double head = 0.0;  // dL / d lhat_i
};

/// Accumulates the gradient of `w.bce * bce(p, y) + w.head * lhat` into
/// `grad`. With `detach_head` the head term reaches the head parameters but
/// not the classifier layers.
void backward(const NetworkParams& params, const ForwardTrace& trace,
              std::span<const std::uint8_t> labels, const SampleLossWeights& w, bool detach_head,
              NetworkParams& grad);

struct BatchView {
  std::vector<std::span<const double>> features;
  std::vector<std::span<const std::uint8_t>> labels;
  /// Disjoint index pairs into the batch forming B^p.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Value of the joint objective on one minibatch; fills `grad` (if given)
/// with its exact gradient.
double batch_objective(const NetworkParams& params, const BatchView& batch, double lambda,
                       double margin, bool detach_head, NetworkParams* grad);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 10;
  double lr = 0.025;
  double lr_decay_factor = 0.1;
  int lr_decay_epoch = 80;
  double lambda = 1.0;
  double margin = 1.0;
  int grad_stop_epoch = 60;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Minibatch SGD on the joint objective over `labeled_ids`.
NetworkParams train(NetworkParams params, const DatasetPool& pool,
                    const std::vector<SampleId>& labeled_ids, const TrainConfig& config);

}  // namespace mlal::nn
