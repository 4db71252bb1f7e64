// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "data/data.hpp"
#include "nn/network.hpp"
#include "query/query.hpp"

namespace mlal {

enum class InitMode { kCold, kWarm };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& text);

struct DataSource {
  enum class Kind { kSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;
  data::SyntheticConfig synthetic;
  std::string features_path;
  std::string labels_path;
  std::string splits_path;  // empty: seeded 50/25/25 split
  std::uint64_t split_seed = 0;
  bool operator==(const DataSource&) const = default;
};

struct ExperimentConfig {
  query::QuerySpec query;
  nn::TrainConfig train;
  std::vector<std::size_t> hidden{32};
  std::size_t head_hidden = 16;
  InitMode init_mode = InitMode::kWarm;
  int max_iterations = 10;
  std::optional<std::size_t> target_labeled;
  bool oracle = true;
  std::size_t initial_labeled = 20;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  DataSource data;
  bool audit_scores = false;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat `section.key -> raw value` view of a TOML-style document: `[section]`
/// headers, `key = value` lines, `#` comments, quoted or bare strings,
/// numbers, booleans and flat `[a, b]` arrays.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  /// Applies a `section.key=value` override; the key must be a known field.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& raw_value);

  ExperimentConfig to_config() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

}  // namespace mlal
