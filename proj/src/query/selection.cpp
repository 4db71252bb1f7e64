// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "query/query.hpp"

namespace mlal::query {

void rank_by_score(std::vector<ScoredSample>& scored) {
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredSample& a, const ScoredSample& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
}

std::vector<SampleId> diversity_select(const std::vector<ScoredSample>& scored, std::size_t b,
                                       std::uint64_t seed) {
  require(b >= 1, ErrorCode::kInvalidArgument, "diversity selection needs b >= 1");
  require(scored.size() >= b, ErrorCode::kInvalidArgument,
          "diversity selection needs at least b candidates (have " + std::to_string(scored.size()) +
              ", b = " + std::to_string(b) + ")");

  std::vector<std::vector<double>> points;
  points.reserve(scored.size());
  for (const auto& s : scored) points.push_back(s.embedding);
  const KMeansResult clusters = kmeans_pp(points, b, seed);

  std::vector<std::ptrdiff_t> best(clusters.num_clusters(), -1);
  for (std::size_t i = 0; i < scored.size(); ++i) {
    auto& slot = best[clusters.assignment[i]];
    if (slot < 0) {
      slot = static_cast<std::ptrdiff_t>(i);
      continue;
    }
    const auto& cur = scored[slot];
    if (scored[i].score > cur.score || (scored[i].score == cur.score && scored[i].id < cur.id)) {
      slot = static_cast<std::ptrdiff_t>(i);
    }
  }

  std::vector<ScoredSample> picked;
  std::set<SampleId> taken;
  for (auto slot : best) {
    if (slot < 0) continue;
    picked.push_back(scored[slot]);
    taken.insert(scored[slot].id);
  }
  if (picked.size() < b) {
    std::vector<ScoredSample> rest;
    for (const auto& s : scored) {
      if (!taken.count(s.id)) rest.push_back(s);
    }
    rank_by_score(rest);
    for (std::size_t i = 0; picked.size() < b; ++i) picked.push_back(rest[i]);
  }
  rank_by_score(picked);

  std::vector<SampleId> ids;
  for (const auto& s : picked) ids.push_back(s.id);
  return ids;
}

std::vector<SampleId> uniform_draw(const DatasetPool& pool, std::size_t b, std::uint64_t seed,
                                   std::uint64_t iteration) {
  Rng rng = make_rng(seed, Stream::kQuery, iteration);
  return sample_without_replacement(std::vector<SampleId>(pool.unlabeled.begin(), pool.unlabeled.end()),
                                    b, rng);
}

SelectionResult select_batch(const QuerySpec& spec, const nn::NetworkParams& now,
                             const nn::NetworkParams* previous, const DatasetPool& pool,
                             std::uint64_t iteration) {
  spec.validate();
  require(!pool.unlabeled.empty(), ErrorCode::kState, "unlabeled pool is empty");
  const std::size_t b = static_cast<std::size_t>(spec.budget);

  SelectionResult result;
  auto draw_uniformly = [&] {
    result.uniform_draw = true;
    result.ids = uniform_draw(pool, b, spec.seed, iteration);
    result.scores.assign(result.ids.size(), std::numeric_limits<double>::quiet_NaN());
    return result;
  };

  std::vector<const Sample*> samples;
  samples.reserve(pool.unlabeled.size());
  for (const auto& id : pool.unlabeled) samples.push_back(&pool.at(id));

  switch (spec.uncertainty) {
    case Uncertainty::kRandom:
      return draw_uniformly();
    case Uncertainty::kLL:
      result.candidates = score_ll(now, samples);
      break;
    case Uncertainty::kMGE:
      result.candidates = score_mge(now, samples, spec.include_bias);
      break;
    case Uncertainty::kTPD: {
      auto scored = score_tpd(now, previous, samples);
      if (!scored) return draw_uniformly();
      result.candidates = std::move(*scored);
      break;
    }
  }

  std::vector<ScoredSample> ranked = result.candidates;
  rank_by_score(ranked);
  const std::size_t top = std::min(ranked.size(), b * static_cast<std::size_t>(spec.multiplier));
  ranked.resize(top);

  std::vector<SampleId> chosen;
  if (ranked.size() <= b) {
    for (const auto& s : ranked) chosen.push_back(s.id);
  } else if (spec.diversity) {
    chosen = diversity_select(ranked, b, derive_seed(spec.seed, Stream::kCluster, iteration));
  } else {
    for (std::size_t i = 0; i < b; ++i) chosen.push_back(ranked[i].id);
  }

  std::map<SampleId, double> score_of;
  for (const auto& s : ranked) score_of.emplace(s.id, s.score);
  result.ids = chosen;
  for (const auto& id : chosen) result.scores.push_back(score_of.at(id));
  return result;
}

void write_score_audit(std::ostream& out, std::uint64_t iteration, const QuerySpec& spec,
                       const SelectionResult& result, bool header) {
  if (header) out << "iteration,id,strategy,score,selected\n";
  const std::set<SampleId> selected(result.ids.begin(), result.ids.end());
  const auto precision = out.precision(17);
  for (const auto& c : result.candidates) {
    out << iteration << ',' << c.id << ',' << spec.label() << ',' << c.score << ','
        << (selected.count(c.id) ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

}  // namespace mlal::query
