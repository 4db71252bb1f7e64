// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mlal {

using SampleId = std::string;
using FeatureVector = std::vector<double>;
/// Binary multi-label vector, one entry per class, each 0 or 1.
using LabelVector = std::vector<std::uint8_t>;
using LabelMap = std::map<SampleId, LabelVector>;

struct Sample {
  SampleId id;
  FeatureVector features;
  std::optional<LabelVector> true_labels;
  bool operator==(const Sample&) const = default;
};

enum class Split { kPool, kValidation, kTest };

/// Partition of the sample archive into labeled (T), unlabeled (U),
/// validation and test id sets. Ordered sets keep every traversal
/// deterministic.
struct DatasetPool {
  std::set<SampleId> labeled;
  std::set<SampleId> unlabeled;
  std::set<SampleId> validation;
  std::set<SampleId> test;
  std::map<SampleId, Sample> samples;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<std::string> class_names;

  const Sample& at(const SampleId& id) const;
  bool operator==(const DatasetPool&) const = default;
};

/// Validates the label vector shape and that it is binary with at least one
/// positive entry. Throws kData with `context` in the message.
void validate_label_vector(const LabelVector& labels, std::size_t num_classes,
                           const std::string& context);

/// Checks disjointness, coverage, and label presence. Throws kState.
void check_pool_invariants(const DatasetPool& pool);

/// Returns a copy of `pool` with `ids` moved from unlabeled to labeled.
DatasetPool move_to_labeled(const DatasetPool& pool, const std::set<SampleId>& ids,
                            const LabelMap& labels);

/// Output i is 1 iff p_i > threshold (strict).
LabelVector threshold_predictions(std::span<const double> probs, double threshold = 0.5);

using BinaryMatrix = std::vector<LabelVector>;

struct MetricReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  std::size_t num_labeled = 0;
  bool operator==(const MetricReport&) const = default;
};

/// Pooled F1 over all sample/class pairs; 1.0 when TP = FP = FN = 0.
double micro_f1(const BinaryMatrix& pred, const BinaryMatrix& truth);

struct MacroF1 {
  double macro = 0.0;
  std::vector<double> per_class;
};

/// Column-wise F1 (1.0 for a class with no positives on either side),
/// averaged without weighting.
MacroF1 macro_f1(const BinaryMatrix& pred, const BinaryMatrix& truth);

}  // namespace mlal
