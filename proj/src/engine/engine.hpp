// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "core/types.hpp"
#include "engine/config.hpp"
#include "nn/network.hpp"
#include "query/query.hpp"

namespace mlal {

struct PendingBatch {
  std::uint64_t iteration = 0;
  std::vector<SampleId> ids;
  std::string issued_at;
  LabelMap received;

  std::size_t remaining() const { return ids.size() - received.size(); }
  bool operator==(const PendingBatch&) const = default;
};

struct SelectionRecord {
  std::uint64_t iteration = 0;
  SampleId sample_id;
  std::string strategy;
  double score = 0.0;  // NaN for uniform draws
};

bool operator==(const SelectionRecord& a, const SelectionRecord& b);

struct ALState {
  std::uint64_t seed = 0;
  /// Index of the next iteration to run (starts at 1).
  std::uint64_t tau = 1;
  DatasetPool pool;
  /// Model trained in the latest iteration, absent before the first one.
  std::optional<nn::NetworkParams> params_now;
  /// Model of the iteration before that (F^{tau-1} for TPD).
  std::optional<nn::NetworkParams> params_prev;
  std::vector<MetricReport> history;
  std::optional<PendingBatch> pending;
  std::vector<SelectionRecord> selections;
  ExperimentConfig config;

  bool operator==(const ALState&) const = default;
};

enum class IterationOutcome {
  kAdvanced,        // oracle labels applied, tau incremented
  kAwaitingLabels,  // batch parked for an annotator
  kExhausted,       // nothing left to query
};

/// Optional callbacks into a round: the parameters training starts from, and
/// the full scoring pass behind each selection.
struct RoundHook {
  std::function<void(std::uint64_t tau, const nn::NetworkParams& initial)> on_start;
  std::function<void(std::uint64_t tau, const query::SelectionResult& result)> on_selection;
};

/// Loads or generates the configured dataset.
DatasetPool load_dataset(const ExperimentConfig& config);

/// Draws the initial labeled set (seeded) and, outside oracle mode, hides
/// the labels of every remaining pool sample.
ALState make_initial_state(const ExperimentConfig& config, DatasetPool pool, std::uint64_t seed);

nn::Architecture architecture_for(const ExperimentConfig& config, const DatasetPool& pool);

/// Starting parameters of iteration `state.tau` under the configured init mode.
nn::NetworkParams initial_parameters(const ALState& state);

/// Micro/macro F1 of `params` on the pool's test split.
MetricReport evaluate(const nn::NetworkParams& params, const DatasetPool& pool);

/// One round: initialize, train on T, evaluate, select, then label (oracle)
/// or park a pending batch.
IterationOutcome run_iteration(ALState& state, const RoundHook& hook = {});

struct SubmitResult {
  std::size_t accepted = 0;
  std::size_t remaining = 0;
  bool resolved = false;
};

/// Per-id reasons why `labels` cannot be applied to the pending batch; empty
/// when the submission is acceptable.
std::map<SampleId, std::string> label_problems(const ALState& state, const LabelMap& labels);

/// Validates every entry before applying any; on failure nothing changes and
/// the error message lists a reason per offending id.
SubmitResult submit_labels(ALState& state, const LabelMap& labels);

/// No pending batch and the iteration cap, labeled target, or pool is exhausted.
bool is_finished(const ALState& state);

struct ExperimentResult {
  std::vector<MetricReport> history;
  std::vector<SelectionRecord> selections;
  ALState final_state;
};

/// Oracle-mode loop from the initial draw until finished.
ExperimentResult run_experiment(const ExperimentConfig& config, const DatasetPool& dataset,
                                std::uint64_t seed);

/// Continues an oracle-mode state until finished.
void run_to_completion(ALState& state, const RoundHook& hook = {});

void write_history_csv(std::ostream& out, const std::vector<MetricReport>& history);
void write_selection_csv(std::ostream& out, const std::vector<SelectionRecord>& selections);

inline constexpr int kCheckpointFormatVersion = 1;

std::string save_checkpoint(const ALState& state);
ALState load_checkpoint(const std::string& bytes);

}  // namespace mlal
