// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "core/types.hpp"
#include "nn/network.hpp"

namespace mlal::query {

enum class Uncertainty { kLL, kTPD, kMGE, kRandom };

std::string to_string(Uncertainty u);
Uncertainty parse_uncertainty(const std::string& text);

struct QuerySpec {
  Uncertainty uncertainty = Uncertainty::kMGE;
  bool diversity = true;
  int budget = 20;
  int multiplier = 3;
  bool include_bias = true;
  std::uint64_t seed = 0;

  void validate() const;
  /// Display name such as "MGE+Clustering", "LL" or "Random".
  std::string label() const;
  bool operator==(const QuerySpec&) const = default;
};

struct ScoredSample {
  SampleId id;
  double score = 0.0;
  /// Penultimate activation of the current model; the clustering space.
  std::vector<double> embedding;
};

/// Last-layer BCE gradient against the thresholded pseudo-label, kept in
/// factored form: dW = residual * feature^T and db = residual.
struct GradientEmbedding {
  std::vector<double> residual;
  std::vector<double> feature;
  bool includes_bias = true;

  /// Frobenius norm of the full gradient: |residual| * sqrt(|feature|^2 + [bias]).
  double norm() const;
};

GradientEmbedding gradient_embedding(const nn::ForwardTrace& trace, bool include_bias = true);

std::vector<ScoredSample> score_ll(const nn::NetworkParams& params,
                                   const std::vector<const Sample*>& samples);

/// Returns nullopt when there is no previous model; callers fall back to a
/// seeded uniform draw.
std::optional<std::vector<ScoredSample>> score_tpd(const nn::NetworkParams& now,
                                                   const nn::NetworkParams* previous,
                                                   const std::vector<const Sample*>& samples);

std::vector<ScoredSample> score_mge(const nn::NetworkParams& params,
                                    const std::vector<const Sample*>& samples,
                                    bool include_bias = true);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centers;
  /// True when fewer than k distinct points exist; one cluster per distinct point.
  bool deficit = false;
  int lloyd_iterations = 0;
  /// Within-cluster SSE after every assignment step.
  std::vector<double> sse_trace;

  std::size_t num_clusters() const { return centers.size(); }
};

inline constexpr int kMaxLloydIterations = 100;
inline constexpr int kKMeansRestarts = 5;

KMeansResult kmeans_pp(const std::vector<std::vector<double>>& points, std::size_t k,
                       std::uint64_t seed);

double within_cluster_sse(const std::vector<std::vector<double>>& points,
                          const std::vector<std::size_t>& assignment);

/// Clusters the candidates into b groups and keeps each group's highest
/// scoring member, topping up from the global ranking when fewer than b
/// groups exist. Output is ordered by score descending, id ascending.
std::vector<SampleId> diversity_select(const std::vector<ScoredSample>& scored, std::size_t b,
                                       std::uint64_t seed);

/// Sorts by score descending, ties by id ascending.
void rank_by_score(std::vector<ScoredSample>& scored);

struct SelectionResult {
  std::vector<SampleId> ids;
  /// Score of each selected id; NaN when the draw was uniform.
  std::vector<double> scores;
  /// Every scored unlabeled sample (empty for uniform draws).
  std::vector<ScoredSample> candidates;
  bool uniform_draw = false;
};

/// Uniform draw of min(b, |U|) unlabeled ids using the iteration's query stream.
std::vector<SampleId> uniform_draw(const DatasetPool& pool, std::size_t b, std::uint64_t seed,
                                   std::uint64_t iteration);

SelectionResult select_batch(const QuerySpec& spec, const nn::NetworkParams& now,
                             const nn::NetworkParams* previous, const DatasetPool& pool,
                             std::uint64_t iteration);

/// Audit rows `iteration,id,strategy,score,selected` for every candidate.
void write_score_audit(std::ostream& out, std::uint64_t iteration, const QuerySpec& spec,
                       const SelectionResult& result, bool header);

}  // namespace mlal::query
