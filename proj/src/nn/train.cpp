// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>

#include "core/error.hpp"
#include "nn/network.hpp"

namespace mlal::nn {

void TrainConfig::validate() const {
  require(epochs > 0, ErrorCode::kConfig, "train.epochs must be positive");
  require(batch_size > 0, ErrorCode::kConfig, "train.batch_size must be positive");
  require(lr >= 0.0, ErrorCode::kConfig, "train.lr must be nonnegative");
  require(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0, ErrorCode::kConfig,
          "train.lr_decay_factor must lie in (0, 1]");
  require(lr_decay_epoch >= 0, ErrorCode::kConfig, "train.lr_decay_epoch must be nonnegative");
  require(lambda >= 0.0, ErrorCode::kConfig, "train.lambda must be nonnegative");
  require(margin > 0.0, ErrorCode::kConfig, "train.margin must be positive");
  require(grad_stop_epoch >= 0 && grad_stop_epoch <= epochs, ErrorCode::kConfig,
          "train.grad_stop_epoch must lie in [0, epochs]");
}

NetworkParams train(NetworkParams params, const DatasetPool& pool,
                    const std::vector<SampleId>& labeled_ids, const TrainConfig& config) {
  config.validate();
  require(!labeled_ids.empty(), ErrorCode::kInvalidArgument, "cannot train on an empty labeled set");
  validate(params);

  std::vector<const Sample*> samples;
  samples.reserve(labeled_ids.size());
  for (const auto& id : labeled_ids) {
    const Sample& s = pool.at(id);
    require(s.true_labels.has_value(), ErrorCode::kInvalidArgument,
            "training sample '" + id + "' has no labels");
    samples.push_back(&s);
  }

  Rng rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  NetworkParams grad = zeros_like(params);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = epoch >= config.lr_decay_epoch ? config.lr * config.lr_decay_factor : config.lr;
    const bool detach = epoch >= config.grad_stop_epoch;
    std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      BatchView batch;
      for (std::size_t i = start; i < end; ++i) {
        batch.features.emplace_back(samples[order[i]]->features);
        batch.labels.emplace_back(*samples[order[i]]->true_labels);
      }
      // B^p: shuffle the minibatch and pair consecutive members.
      std::vector<std::size_t> slots(end - start);
      std::iota(slots.begin(), slots.end(), 0);
      std::shuffle(slots.begin(), slots.end(), rng);
      for (std::size_t i = 0; i + 1 < slots.size(); i += 2) batch.pairs.emplace_back(slots[i], slots[i + 1]);

      batch_objective(params, batch, config.lambda, config.margin, detach, &grad);
      zip_parameters(params, grad, [lr](double& p, double& g) { p -= lr * g; });
    }
  }
  return params;
}

}  // namespace mlal::nn
