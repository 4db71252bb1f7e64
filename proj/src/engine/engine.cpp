// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "engine/engine.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mlal {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_fixed(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << std::fixed << std::setprecision(6) << v;
  }
}

void apply_labels(ALState& state, const std::vector<SampleId>& ids, const LabelMap& labels) {
  state.pool = move_to_labeled(state.pool, std::set<SampleId>(ids.begin(), ids.end()), labels);
  ++state.tau;
}

}  // namespace

bool operator==(const SelectionRecord& a, const SelectionRecord& b) {
  const bool same_score = (std::isnan(a.score) && std::isnan(b.score)) || a.score == b.score;
  return a.iteration == b.iteration && a.sample_id == b.sample_id && a.strategy == b.strategy && same_score;
}

DatasetPool load_dataset(const ExperimentConfig& config) {
  if (config.data.kind == DataSource::Kind::kSynthetic) return data::generate_synthetic(config.data.synthetic);
  std::optional<std::filesystem::path> splits;
  if (!config.data.splits_path.empty()) splits = config.data.splits_path;
  return data::load_csv(config.data.features_path, config.data.labels_path, splits, config.data.split_seed);
}

ALState make_initial_state(const ExperimentConfig& config, DatasetPool pool, std::uint64_t seed) {
  config.validate();
  check_pool_invariants(pool);
  require(pool.labeled.empty(), ErrorCode::kData, "dataset already has labeled pool samples");
  if (config.initial_labeled > pool.unlabeled.size()) {
    fail(ErrorCode::kConfig, "initial labeled size " + std::to_string(config.initial_labeled) +
                                 " exceeds the pool size " + std::to_string(pool.unlabeled.size()));
  }
  Rng rng = make_rng(seed, Stream::kInitialDraw);
  const auto initial = sample_without_replacement(
      std::vector<SampleId>(pool.unlabeled.begin(), pool.unlabeled.end()), config.initial_labeled, rng);
  LabelMap labels;
  for (const auto& id : initial) {
    const auto& s = pool.at(id);
    require(s.true_labels.has_value(), ErrorCode::kData, "initial sample '" + id + "' has no labels");
    labels[id] = *s.true_labels;
  }
  ALState state;
  state.seed = seed;
  state.config = config;
  state.config.query.seed = seed;
  state.pool = move_to_labeled(pool, std::set<SampleId>(initial.begin(), initial.end()), labels);
  if (!config.oracle) {
    for (const auto& id : state.pool.unlabeled) state.pool.samples.at(id).true_labels.reset();
  }
  return state;
}

nn::Architecture architecture_for(const ExperimentConfig& config, const DatasetPool& pool) {
  nn::Architecture arch;
  arch.input_dim = pool.feature_dim;
  arch.num_classes = pool.num_classes;
  arch.hidden = config.hidden;
  // Only the loss-learning strategy trains the auxiliary head.
  arch.head_hidden = config.query.uncertainty == query::Uncertainty::kLL ? config.head_hidden : 0;
  return arch;
}

nn::NetworkParams initial_parameters(const ALState& state) {
  if (state.config.init_mode == InitMode::kWarm && state.params_now) return *state.params_now;
  // COLD draws from a per-round stream; WARM shares round 1's stream.
  Rng rng = make_rng(state.seed, Stream::kInit, state.config.init_mode == InitMode::kWarm ? 1 : state.tau);
  return nn::init_network(architecture_for(state.config, state.pool), rng);
}

MetricReport evaluate(const nn::NetworkParams& params, const DatasetPool& pool) {
  BinaryMatrix pred, truth;
  for (const auto& id : pool.test) {
    const Sample& s = pool.at(id);
    pred.push_back(threshold_predictions(nn::predict(params, s.features), 0.5));
    truth.push_back(*s.true_labels);
  }
  MetricReport report;
  report.micro_f1 = micro_f1(pred, truth);
  auto macro = macro_f1(pred, truth);
  report.macro_f1 = macro.macro;
  report.per_class_f1 = std::move(macro.per_class);
  report.num_labeled = pool.labeled.size();
  return report;
}

IterationOutcome run_iteration(ALState& state, const RoundHook& hook) {
  require(!state.pending.has_value(), ErrorCode::kState,
          "iteration " + std::to_string(state.tau) + " is still waiting for labels");
  if (state.pool.unlabeled.empty()) return IterationOutcome::kExhausted;

  const std::uint64_t tau = state.tau;
  nn::NetworkParams init = initial_parameters(state);
  if (hook.on_start) hook.on_start(tau, init);

  nn::TrainConfig train = state.config.train;
  train.seed = derive_seed(state.seed, Stream::kTrain, tau);
  const std::vector<SampleId> labeled(state.pool.labeled.begin(), state.pool.labeled.end());
  nn::NetworkParams trained = nn::train(std::move(init), state.pool, labeled, train);

  state.params_prev = std::move(state.params_now);
  state.params_now = std::move(trained);
  state.history.push_back(evaluate(*state.params_now, state.pool));

  query::QuerySpec spec = state.config.query;
  spec.seed = state.seed;
  const auto selection = query::select_batch(spec, *state.params_now,
                                             state.params_prev ? &*state.params_prev : nullptr,
                                             state.pool, tau);
  if (hook.on_selection) hook.on_selection(tau, selection);
  for (std::size_t i = 0; i < selection.ids.size(); ++i) {
    state.selections.push_back({tau, selection.ids[i], spec.label(), selection.scores[i]});
  }

  if (state.config.oracle) {
    LabelMap labels;
    for (const auto& id : selection.ids) labels[id] = *state.pool.at(id).true_labels;
    apply_labels(state, selection.ids, labels);
    return IterationOutcome::kAdvanced;
  }
  state.pending = PendingBatch{tau, selection.ids, utc_timestamp(), {}};
  return IterationOutcome::kAwaitingLabels;
}

std::map<SampleId, std::string> label_problems(const ALState& state, const LabelMap& labels) {
  require(state.pending.has_value(), ErrorCode::kState, "no batch is awaiting labels");
  const PendingBatch& pending = *state.pending;
  const std::set<SampleId> wanted(pending.ids.begin(), pending.ids.end());
  std::map<SampleId, std::string> problems;
  for (const auto& [id, y] : labels) {
    if (!wanted.count(id)) {
      problems[id] = "not part of the pending batch";
    } else if (pending.received.count(id)) {
      problems[id] = "already labeled in this batch";
    } else {
      try {
        validate_label_vector(y, state.pool.num_classes, "label");
      } catch (const Error& e) {
        problems[id] = e.what();
      }
    }
  }
  return problems;
}

SubmitResult submit_labels(ALState& state, const LabelMap& labels) {
  const auto problems = label_problems(state, labels);
  if (!problems.empty()) {
    std::string message;
    for (const auto& [id, reason] : problems) message += (message.empty() ? "" : "; ") + id + ": " + reason;
    fail(ErrorCode::kInvalidArgument, message);
  }
  PendingBatch& pending = *state.pending;
  for (const auto& [id, y] : labels) pending.received.emplace(id, y);
  SubmitResult result{labels.size(), pending.remaining(), false};
  if (result.remaining == 0) {
    const PendingBatch done = std::move(pending);
    state.pending.reset();
    apply_labels(state, done.ids, done.received);
    result.resolved = true;
  }
  return result;
}

bool is_finished(const ALState& state) {
  if (state.pending) return false;
  if (state.pool.unlabeled.empty()) return true;
  if (state.history.size() >= static_cast<std::size_t>(state.config.max_iterations)) return true;
  return state.config.target_labeled && state.pool.labeled.size() >= *state.config.target_labeled;
}

void run_to_completion(ALState& state, const RoundHook& hook) {
  require(state.config.oracle, ErrorCode::kConfig, "automatic runs need oracle mode");
  while (!is_finished(state)) {
    if (run_iteration(state, hook) == IterationOutcome::kExhausted) break;
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const DatasetPool& dataset,
                                std::uint64_t seed) {
  require(config.oracle, ErrorCode::kConfig, "run_experiment needs oracle mode");
  ExperimentResult result{{}, {}, make_initial_state(config, dataset, seed)};
  run_to_completion(result.final_state);
  result.history = result.final_state.history;
  result.selections = result.final_state.selections;
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<MetricReport>& history) {
  out << "iteration,num_labeled,micro_f1,macro_f1\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i + 1 << ',' << history[i].num_labeled << ',';
    write_fixed(out, history[i].micro_f1);
    out << ',';
    write_fixed(out, history[i].macro_f1);
    out << '\n';
  }
}

void write_selection_csv(std::ostream& out, const std::vector<SelectionRecord>& selections) {
  out << "iteration,sample_id,strategy,score\n";
  for (const auto& s : selections) {
    out << s.iteration << ',' << s.sample_id << ',' << s.strategy << ',';
    write_fixed(out, s.score);
    out << '\n';
  }
}

}  // namespace mlal
