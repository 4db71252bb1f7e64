// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/error.hpp"
#include "core/types.hpp"

namespace mlal {
namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1() const {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
};

std::size_t check_shapes(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  require(pred.size() == truth.size(), ErrorCode::kInvalidArgument,
          "prediction and truth row counts differ");
  const std::size_t cols = pred.empty() ? 0 : pred.front().size();
  for (std::size_t r = 0; r < pred.size(); ++r) {
    require(pred[r].size() == cols && truth[r].size() == cols, ErrorCode::kInvalidArgument,
            "prediction and truth shapes differ at row " + std::to_string(r));
  }
  return cols;
}

}  // namespace

double micro_f1(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  check_shapes(pred, truth);
  Counts c;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    for (std::size_t k = 0; k < pred[r].size(); ++k) {
      const bool p = pred[r][k] != 0, t = truth[r][k] != 0;
      c.tp += p && t;
      c.fp += p && !t;
      c.fn += !p && t;
    }
  }
  return c.f1();
}

MacroF1 macro_f1(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  const std::size_t cols = check_shapes(pred, truth);
  std::vector<Counts> counts(cols);
  for (std::size_t r = 0; r < pred.size(); ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      const bool p = pred[r][k] != 0, t = truth[r][k] != 0;
      counts[k].tp += p && t;
      counts[k].fp += p && !t;
      counts[k].fn += !p && t;
    }
  }
  MacroF1 out;
  out.per_class.reserve(cols);
  double sum = 0.0;
  for (const auto& c : counts) {
    out.per_class.push_back(c.f1());
    sum += out.per_class.back();
  }
  out.macro = cols == 0 ? 1.0 : sum / static_cast<double>(cols);
  return out;
}

}  // namespace mlal
