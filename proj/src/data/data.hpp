// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "core/types.hpp"

namespace mlal::data {

struct SyntheticConfig {
  std::size_t num_classes = 5;
  std::size_t feature_dim = 16;
  std::size_t pool_size = 600;
  std::size_t val_size = 200;
  std::size_t test_size = 400;
  std::size_t max_labels = 3;
  double noise_sigma = 0.1;
  std::uint64_t seed = 7;

  void validate() const;
  bool operator==(const SyntheticConfig&) const = default;
};

/// Prototype mixture: C unit-sphere prototypes; each sample sums a uniform
/// random subset of 1..max_labels prototypes and adds isotropic noise.
/// Pool samples land in `unlabeled`; `labeled` starts empty.
DatasetPool generate_synthetic(const SyntheticConfig& cfg);

/// Reads `id,f0,...` features and `id,l0,...` labels (both with a header).
/// With a split file (`id,split`, split in {pool,val,test}) the partition is
/// taken from it, otherwise ids are shuffled with `seed` and cut 50/25/25.
DatasetPool load_csv(const std::filesystem::path& features, const std::filesystem::path& labels,
                     const std::optional<std::filesystem::path>& splits, std::uint64_t seed);

/// Writes features.csv, labels.csv and splits.csv into `dir`. Pool samples
/// (labeled and unlabeled) are written with split `pool`.
void save_csv(const DatasetPool& pool, const std::filesystem::path& dir);

/// Renders a feature vector as a one-row heatmap strip, PNG encoded.
std::string render_feature_strip_png(std::span<const double> features, int cell_px = 8);

}  // namespace mlal::data
