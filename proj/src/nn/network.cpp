// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace mlal::nn {
namespace {

DenseLayer make_layer(std::size_t in, std::size_t out, Rng& rng) {
  DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& w : layer.weight.data) w = dist(rng);
  for (auto& b : layer.bias) b = dist(rng);
  return layer;
}

DenseLayer zero_layer(const DenseLayer& like) {
  return DenseLayer{Matrix(like.weight.rows, like.weight.cols),
                    std::vector<double>(like.bias.size(), 0.0)};
}

void affine(const DenseLayer& layer, std::span<const double> in, std::vector<double>& out) {
  out.assign(layer.bias.begin(), layer.bias.end());
  for (std::size_t r = 0; r < layer.weight.rows; ++r) {
    const double* row = &layer.weight.data[r * layer.weight.cols];
    double acc = 0.0;
    for (std::size_t c = 0; c < layer.weight.cols; ++c) acc += row[c] * in[c];
    out[r] += acc;
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// grad.weight += delta (x) input; grad.bias += delta.
void accumulate_outer(DenseLayer& grad, std::span<const double> delta, std::span<const double> input) {
  for (std::size_t r = 0; r < delta.size(); ++r) {
    if (delta[r] == 0.0) continue;
    double* row = &grad.weight.data[r * grad.weight.cols];
    for (std::size_t c = 0; c < input.size(); ++c) row[c] += delta[r] * input[c];
    grad.bias[r] += delta[r];
  }
}

// out += W^T delta
void accumulate_transpose(const DenseLayer& layer, std::span<const double> delta,
                          std::vector<double>& out) {
  for (std::size_t r = 0; r < delta.size(); ++r) {
    if (delta[r] == 0.0) continue;
    const double* row = &layer.weight.data[r * layer.weight.cols];
    for (std::size_t c = 0; c < layer.weight.cols; ++c) out[c] += row[c] * delta[r];
  }
}

void check_layer(const DenseLayer& layer, const char* what) {
  require(layer.weight.data.size() == layer.weight.rows * layer.weight.cols &&
              layer.bias.size() == layer.weight.rows && layer.weight.rows > 0 &&
              layer.weight.cols > 0,
          ErrorCode::kInvalidArgument, std::string("malformed ") + what + " layer");
  for (double v : layer.weight.data) {
    require(std::isfinite(v), ErrorCode::kInvalidArgument, std::string("non-finite ") + what + " weight");
  }
  for (double v : layer.bias) {
    require(std::isfinite(v), ErrorCode::kInvalidArgument, std::string("non-finite ") + what + " bias");
  }
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  auto count = [](const DenseLayer& l) { return l.weight.data.size() + l.bias.size(); };
  std::size_t n = 0;
  for (const auto& layer : layers) n += count(layer);
  if (head) n += count(head->fc1) + count(head->fc2);
  return n;
}

NetworkParams init_network(const Architecture& arch, Rng& rng) {
  require(arch.input_dim > 0 && arch.num_classes > 0, ErrorCode::kInvalidArgument,
          "network needs positive input and output widths");
  NetworkParams params;
  std::size_t in = arch.input_dim;
  for (std::size_t width : arch.hidden) {
    require(width > 0, ErrorCode::kInvalidArgument, "hidden layer width must be positive");
    params.layers.push_back(make_layer(in, width, rng));
    in = width;
  }
  params.layers.push_back(make_layer(in, arch.num_classes, rng));
  if (arch.head_hidden > 0) {
    LossHeadParams head;
    head.fc1 = make_layer(in, arch.head_hidden, rng);
    head.fc2 = make_layer(arch.head_hidden, 1, rng);
    params.head = std::move(head);
  }
  return params;
}

NetworkParams zeros_like(const NetworkParams& params) {
  NetworkParams out;
  for (const auto& layer : params.layers) out.layers.push_back(zero_layer(layer));
  if (params.head) out.head = LossHeadParams{zero_layer(params.head->fc1), zero_layer(params.head->fc2)};
  return out;
}

void validate(const NetworkParams& params) {
  require(!params.layers.empty(), ErrorCode::kInvalidArgument, "network has no layers");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    check_layer(params.layers[l], "classifier");
    if (l > 0) {
      require(params.layers[l].in_dim() == params.layers[l - 1].out_dim(),
              ErrorCode::kInvalidArgument, "classifier layer widths do not chain");
    }
  }
  if (params.head) {
    check_layer(params.head->fc1, "head");
    check_layer(params.head->fc2, "head");
    require(params.head->fc1.in_dim() == params.penultimate_dim() &&
                params.head->fc2.in_dim() == params.head->fc1.out_dim() &&
                params.head->fc2.out_dim() == 1,
            ErrorCode::kInvalidArgument, "loss head shape does not match the classifier");
  }
}

ForwardTrace forward(const NetworkParams& params, std::span<const double> x, bool with_head) {
  require(x.size() == params.input_dim(), ErrorCode::kInvalidArgument,
          "input has dimension " + std::to_string(x.size()) + ", network expects " +
              std::to_string(params.input_dim()));
  const std::size_t n = params.layers.size();
  ForwardTrace trace;
  trace.activations.resize(n + 1);
  trace.pre_activations.resize(n);
  trace.activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < n; ++l) {
    affine(params.layers[l], trace.activations[l], trace.pre_activations[l]);
    auto& act = trace.activations[l + 1];
    act = trace.pre_activations[l];
    if (l + 1 < n) {
      for (auto& v : act) v = std::max(v, 0.0);
    } else {
      for (auto& v : act) v = sigmoid(v);
    }
  }
  if (with_head) {
    require(params.head.has_value(), ErrorCode::kInvalidArgument, "network has no loss head");
    affine(params.head->fc1, trace.penultimate(), trace.head_pre);
    trace.head_hidden = trace.head_pre;
    for (auto& v : trace.head_hidden) v = std::max(v, 0.0);
    std::vector<double> out;
    affine(params.head->fc2, trace.head_hidden, out);
    trace.head_value = out[0];
  }
  return trace;
}

std::vector<double> predict(const NetworkParams& params, std::span<const double> x) {
  return forward(params, x, false).activations.back();
}

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels) {
  require(probs.size() == labels.size(), ErrorCode::kInvalidArgument,
          "probability and label vectors differ in length");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
    loss -= labels[i] ? std::log(p) : std::log1p(-p);
  }
  return loss;
}

double ranking_loss(double loss_j, double loss_k, double pred_j, double pred_k, double margin) {
  const double sign = loss_j - loss_k >= 0.0 ? 1.0 : -1.0;
  return std::max(0.0, -sign * (pred_j - pred_k) + margin);
}

double joint_loss(std::span<const double> batch_losses, std::span<const RankingPairTerm> pairs,
                  double lambda, double margin) {
  require(!batch_losses.empty(), ErrorCode::kInvalidArgument, "empty batch");
  require(pairs.size() == batch_losses.size() / 2, ErrorCode::kInvalidArgument,
          "pair count must equal floor(|B| / 2)");
  const double n = static_cast<double>(batch_losses.size());
  double mean = 0.0;
  for (double l : batch_losses) mean += l;
  mean /= n;
  double ranking = 0.0;
  for (const auto& p : pairs) ranking += ranking_loss(p.loss_j, p.loss_k, p.pred_j, p.pred_k, margin);
  return mean + lambda * (2.0 / n) * ranking;
}

void backward(const NetworkParams& params, const ForwardTrace& trace,
              std::span<const std::uint8_t> labels, const SampleLossWeights& w, bool detach_head,
              NetworkParams& grad) {
  const std::size_t n = params.layers.size();
  require(trace.pre_activations.size() == n && trace.activations.size() == n + 1 &&
              trace.activations[0].size() == params.input_dim() &&
              trace.probs().size() == params.num_classes(),
          ErrorCode::kInvalidArgument, "trace does not match the network");
  require(labels.size() == params.num_classes(), ErrorCode::kInvalidArgument,
          "label vector does not match the class count");

  std::vector<double> delta(params.num_classes(), 0.0);
  const auto probs = trace.probs();
  for (std::size_t c = 0; c < delta.size(); ++c) {
    const double p = probs[c];
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;  // clamped: flat loss
    delta[c] = w.bce * (p - static_cast<double>(labels[c]));
  }

  accumulate_outer(grad.layers[n - 1], delta, trace.activations[n - 1]);
  std::vector<double> upstream(params.penultimate_dim(), 0.0);
  if (n > 1) accumulate_transpose(params.layers[n - 1], delta, upstream);

  if (params.head && w.head != 0.0) {
    require(trace.head_value.has_value(), ErrorCode::kInvalidArgument,
            "trace was produced without the loss head");
    const auto& head = *params.head;
    const double dvalue = w.head;
    accumulate_outer(grad.head->fc2, std::span<const double>(&dvalue, 1), trace.head_hidden);
    std::vector<double> dhidden(head.fc1.out_dim(), 0.0);
    for (std::size_t k = 0; k < dhidden.size(); ++k) {
      dhidden[k] = trace.head_pre[k] > 0.0 ? head.fc2.weight.data[k] * dvalue : 0.0;
    }
    accumulate_outer(grad.head->fc1, dhidden, trace.penultimate());
    if (!detach_head && n > 1) accumulate_transpose(head.fc1, dhidden, upstream);
  }

  for (std::size_t l = n - 1; l-- > 0;) {
    const auto& pre = trace.pre_activations[l];
    std::vector<double> d(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) d[i] = pre[i] > 0.0 ? upstream[i] : 0.0;
    accumulate_outer(grad.layers[l], d, trace.activations[l]);
    if (l > 0) {
      upstream.assign(params.layers[l].in_dim(), 0.0);
      accumulate_transpose(params.layers[l], d, upstream);
    }
  }
}

double batch_objective(const NetworkParams& params, const BatchView& batch, double lambda,
                       double margin, bool detach_head, NetworkParams* grad) {
  const std::size_t n = batch.features.size();
  require(n > 0 && batch.labels.size() == n, ErrorCode::kInvalidArgument, "malformed batch");
  const bool with_head = params.head.has_value();
  std::vector<ForwardTrace> traces;
  std::vector<double> losses;
  traces.reserve(n);
  losses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    traces.push_back(forward(params, batch.features[i], with_head));
    losses.push_back(bce_loss(traces.back().probs(), batch.labels[i]));
  }

  const double inv = 1.0 / static_cast<double>(n);
  std::vector<double> head_weight(n, 0.0);
  std::vector<RankingPairTerm> terms;
  if (with_head) {
    for (auto [j, k] : batch.pairs) {
      RankingPairTerm t{losses[j], losses[k], *traces[j].head_value, *traces[k].head_value};
      terms.push_back(t);
      if (ranking_loss(t.loss_j, t.loss_k, t.pred_j, t.pred_k, margin) > 0.0) {
        const double sign = t.loss_j - t.loss_k >= 0.0 ? 1.0 : -1.0;
        head_weight[j] += -sign * lambda * 2.0 * inv;
        head_weight[k] += sign * lambda * 2.0 * inv;
      }
    }
  }
  double value;
  if (with_head) {
    value = joint_loss(losses, terms, lambda, margin);
  } else {
    value = 0.0;
    for (double l : losses) value += l;
    value *= inv;
  }

  if (grad) {
    *grad = zeros_like(params);
    for (std::size_t i = 0; i < n; ++i) {
      backward(params, traces[i], batch.labels[i], SampleLossWeights{inv, head_weight[i]},
               detach_head, *grad);
    }
  }
  return value;
}

}  // namespace mlal::nn
