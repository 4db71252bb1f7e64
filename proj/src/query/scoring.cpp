// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <cmath>

#include "core/error.hpp"
#include "query/query.hpp"

namespace mlal::query {
namespace {

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> to_vector(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

std::string to_string(Uncertainty u) {
  switch (u) {
    case Uncertainty::kLL: return "LL";
    case Uncertainty::kTPD: return "TPD";
    case Uncertainty::kMGE: return "MGE";
    case Uncertainty::kRandom: return "RANDOM";
  }
  return "?";
}

Uncertainty parse_uncertainty(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (t == "LL") return Uncertainty::kLL;
  if (t == "TPD") return Uncertainty::kTPD;
  if (t == "MGE") return Uncertainty::kMGE;
  if (t == "RANDOM") return Uncertainty::kRandom;
  fail(ErrorCode::kConfig, "unknown uncertainty strategy '" + text + "' (expected LL, TPD, MGE or RANDOM)");
}

void QuerySpec::validate() const {
  require(budget >= 1, ErrorCode::kConfig, "query.budget must be at least 1");
  require(multiplier >= 1, ErrorCode::kConfig, "query.multiplier must be at least 1");
}

std::string QuerySpec::label() const {
  if (uncertainty == Uncertainty::kRandom) return "Random";
  return to_string(uncertainty) + (diversity ? "+Clustering" : "");
}

double GradientEmbedding::norm() const {
  return std::sqrt(squared_norm(residual)) *
         std::sqrt(squared_norm(feature) + (includes_bias ? 1.0 : 0.0));
}

GradientEmbedding gradient_embedding(const nn::ForwardTrace& trace, bool include_bias) {
  GradientEmbedding g;
  const auto probs = trace.probs();
  const LabelVector pseudo = threshold_predictions(probs, 0.5);
  g.residual.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) g.residual[i] = probs[i] - pseudo[i];
  g.feature = to_vector(trace.penultimate());
  g.includes_bias = include_bias;
  return g;
}

std::vector<ScoredSample> score_ll(const nn::NetworkParams& params,
                                   const std::vector<const Sample*>& samples) {
  require(params.head.has_value(), ErrorCode::kInvalidArgument,
          "LL scoring needs a network with a loss head");
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  for (const Sample* s : samples) {
    auto trace = nn::forward(params, s->features, true);
    out.push_back({s->id, *trace.head_value, to_vector(trace.penultimate())});
  }
  return out;
}

std::optional<std::vector<ScoredSample>> score_tpd(const nn::NetworkParams& now,
                                                   const nn::NetworkParams* previous,
                                                   const std::vector<const Sample*>& samples) {
  if (previous == nullptr) return std::nullopt;
  require(now.input_dim() == previous->input_dim() && now.num_classes() == previous->num_classes(),
          ErrorCode::kInvalidArgument, "TPD models disagree on input or class dimension");
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  for (const Sample* s : samples) {
    auto trace = nn::forward(now, s->features, false);
    const auto before = nn::predict(*previous, s->features);
    const auto probs = trace.probs();
    double d = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) d += (probs[i] - before[i]) * (probs[i] - before[i]);
    out.push_back({s->id, std::sqrt(d), to_vector(trace.penultimate())});
  }
  return out;
}

std::vector<ScoredSample> score_mge(const nn::NetworkParams& params,
                                    const std::vector<const Sample*>& samples, bool include_bias) {
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  for (const Sample* s : samples) {
    auto trace = nn::forward(params, s->features, false);
    auto g = gradient_embedding(trace, include_bias);
    out.push_back({s->id, g.norm(), std::move(g.feature)});
  }
  return out;
}

}  // namespace mlal::query
