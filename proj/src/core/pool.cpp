// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "core/error.hpp"
#include "core/types.hpp"

namespace mlal {

const Sample& DatasetPool::at(const SampleId& id) const {
  auto it = samples.find(id);
  if (it == samples.end()) fail(ErrorCode::kInvalidArgument, "unknown sample id '" + id + "'");
  return it->second;
}

void validate_label_vector(const LabelVector& labels, std::size_t num_classes,
                           const std::string& context) {
  if (labels.size() != num_classes) {
    fail(ErrorCode::kData, context + ": label vector has length " + std::to_string(labels.size()) +
                               ", expected " + std::to_string(num_classes));
  }
  bool any = false;
  for (auto v : labels) {
    if (v > 1) fail(ErrorCode::kData, context + ": label entries must be 0 or 1");
    any = any || v == 1;
  }
  if (!any) {
    fail(ErrorCode::kData,
         context + ": all-zero label vector; every sample must carry at least one class");
  }
}

void check_pool_invariants(const DatasetPool& pool) {
  std::size_t total = 0;
  std::set<SampleId> seen;
  auto visit = [&](const std::set<SampleId>& ids, const char* name, bool needs_labels) {
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        fail(ErrorCode::kState, "sample '" + id + "' appears in more than one split");
      }
      auto it = pool.samples.find(id);
      if (it == pool.samples.end()) {
        fail(ErrorCode::kState, std::string(name) + " set references unknown sample '" + id + "'");
      }
      if (needs_labels && !it->second.true_labels) {
        fail(ErrorCode::kState, std::string(name) + " sample '" + id + "' has no labels");
      }
      ++total;
    }
  };
  visit(pool.labeled, "labeled", true);
  visit(pool.unlabeled, "unlabeled", false);
  visit(pool.validation, "validation", true);
  visit(pool.test, "test", true);
  if (total != pool.samples.size()) {
    fail(ErrorCode::kState, "pool splits do not cover every sample");
  }
  for (const auto& [id, s] : pool.samples) {
    if (s.features.size() != pool.feature_dim) {
      fail(ErrorCode::kState, "sample '" + id + "' has wrong feature dimension");
    }
    for (double f : s.features) {
      if (!std::isfinite(f)) fail(ErrorCode::kState, "sample '" + id + "' has non-finite feature");
    }
  }
}

DatasetPool move_to_labeled(const DatasetPool& pool, const std::set<SampleId>& ids,
                            const LabelMap& labels) {
  for (const auto& id : ids) {
    if (pool.labeled.count(id)) {
      fail(ErrorCode::kInvalidArgument, "sample '" + id + "' is already labeled");
    }
    if (!pool.unlabeled.count(id)) {
      fail(ErrorCode::kInvalidArgument, "sample '" + id + "' is not in the unlabeled pool");
    }
    auto it = labels.find(id);
    if (it == labels.end()) fail(ErrorCode::kInvalidArgument, "no label given for '" + id + "'");
    validate_label_vector(it->second, pool.num_classes, "sample '" + id + "'");
  }
  DatasetPool out = pool;
  for (const auto& id : ids) {
    out.unlabeled.erase(id);
    out.labeled.insert(id);
    out.samples.at(id).true_labels = labels.at(id);
  }
  return out;
}

LabelVector threshold_predictions(std::span<const double> probs, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument,
          "threshold must lie in (0, 1)");
  LabelVector out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > threshold ? 1 : 0;
  return out;
}

}  // namespace mlal
