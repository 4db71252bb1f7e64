// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "data/data.hpp"

namespace mlal::data {

void SyntheticConfig::validate() const {
  require(num_classes >= 1 && feature_dim >= 1, ErrorCode::kConfig,
          "synthetic data needs num_classes >= 1 and feature_dim >= 1");
  require(max_labels >= 1 && max_labels <= num_classes, ErrorCode::kConfig,
          "data.max_labels must lie in [1, num_classes]");
  require(pool_size >= 1 && val_size >= 1 && test_size >= 1, ErrorCode::kConfig,
          "split sizes must be at least 1");
  require(noise_sigma >= 0.0, ErrorCode::kConfig, "data.noise_sigma must be nonnegative");
}

DatasetPool generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, Stream::kSynthetic);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> prototypes(cfg.num_classes, std::vector<double>(cfg.feature_dim));
  for (auto& proto : prototypes) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : proto) {
        v = gauss(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : proto) v /= norm;
  }

  DatasetPool pool;
  pool.num_classes = cfg.num_classes;
  pool.feature_dim = cfg.feature_dim;
  for (std::size_t c = 0; c < cfg.num_classes; ++c) pool.class_names.push_back("class_" + std::to_string(c));

  std::vector<std::size_t> classes(cfg.num_classes);
  std::iota(classes.begin(), classes.end(), 0);
  std::uniform_int_distribution<std::size_t> count_dist(1, cfg.max_labels);
  const std::size_t total = cfg.pool_size + cfg.val_size + cfg.test_size;
  for (std::size_t n = 0; n < total; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06zu", n);
    Sample s;
    s.id = buf;
    s.features.assign(cfg.feature_dim, 0.0);
    LabelVector labels(cfg.num_classes, 0);
    for (std::size_t c : sample_without_replacement(classes, count_dist(rng), rng)) {
      labels[c] = 1;
      for (std::size_t j = 0; j < cfg.feature_dim; ++j) s.features[j] += prototypes[c][j];
    }
    if (cfg.noise_sigma > 0.0) {
      for (auto& v : s.features) v += cfg.noise_sigma * gauss(rng);
    }
    s.true_labels = std::move(labels);
    if (n < cfg.pool_size) {
      pool.unlabeled.insert(s.id);
    } else if (n < cfg.pool_size + cfg.val_size) {
      pool.validation.insert(s.id);
    } else {
      pool.test.insert(s.id);
    }
    pool.samples.emplace(s.id, std::move(s));
  }
  return pool;
}

}  // namespace mlal::data
