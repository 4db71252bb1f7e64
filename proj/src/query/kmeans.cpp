// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <map>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "query/query.hpp"

namespace mlal::query {
namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = sq_dist(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Recomputes centers as member means; empty clusters keep their center.
void update_centers(const std::vector<Point>& points, const std::vector<std::size_t>& assignment,
                    std::vector<Point>& centers) {
  const std::size_t dim = points.front().size();
  std::vector<Point> sums(centers.size(), Point(dim, 0.0));
  std::vector<std::size_t> counts(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) sums[assignment[i]][j] += points[i][j];
    ++counts[assignment[i]];
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
  }
}

double sse_against(const std::vector<Point>& points, const std::vector<std::size_t>& assignment,
                   const std::vector<Point>& centers) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += sq_dist(points[i], centers[assignment[i]]);
  return s;
}

KMeansResult single_run(const std::vector<Point>& points, std::size_t k, std::uint64_t seed) {
  KMeansResult result;
  result.assignment.resize(points.size());
  // D^2 seeding.
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
  result.centers.push_back(points[first(rng)]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = sq_dist(points[i], result.centers[0]);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (result.centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    const double target = unit(rng) * total;
    std::size_t pick = points.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    result.centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], sq_dist(points[i], result.centers.back()));
    }
  }

  // Lloyd iterations until the assignment is a fixpoint.
  for (std::size_t i = 0; i < points.size(); ++i) result.assignment[i] = nearest(points[i], result.centers);
  result.sse_trace.push_back(sse_against(points, result.assignment, result.centers));
  for (int it = 0; it < kMaxLloydIterations; ++it) {
    update_centers(points, result.assignment, result.centers);
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t c = nearest(points[i], result.centers);
      changed = changed || c != result.assignment[i];
      result.assignment[i] = c;
    }
    ++result.lloyd_iterations;
    result.sse_trace.push_back(sse_against(points, result.assignment, result.centers));
    if (!changed) break;
  }
  return result;
}

}  // namespace

double within_cluster_sse(const std::vector<std::vector<double>>& points,
                          const std::vector<std::size_t>& assignment) {
  if (points.empty()) return 0.0;
  const std::size_t k = *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<Point> centers(k, Point(points.front().size(), 0.0));
  update_centers(points, assignment, centers);
  return sse_against(points, assignment, centers);
}

KMeansResult kmeans_pp(const std::vector<std::vector<double>>& points, std::size_t k,
                       std::uint64_t seed) {
  require(k >= 1, ErrorCode::kInvalidArgument, "kmeans needs k >= 1");
  require(!points.empty(), ErrorCode::kInvalidArgument, "kmeans needs at least one point");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    require(p.size() == dim, ErrorCode::kInvalidArgument, "kmeans points differ in dimension");
  }

  KMeansResult result;
  result.assignment.resize(points.size());

  std::map<Point, std::size_t> distinct;
  for (const auto& p : points) {
    distinct.emplace(p, 0);
    if (distinct.size() >= k) break;
  }
  if (distinct.size() < k) {
    // Fewer distinct points than clusters: one cluster per distinct point,
    // numbered by first occurrence.
    std::map<Point, std::size_t> index;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto [it, inserted] = index.emplace(points[i], result.centers.size());
      if (inserted) result.centers.push_back(points[i]);
      result.assignment[i] = it->second;
    }
    result.deficit = true;
    result.sse_trace.push_back(0.0);
    return result;
  }

  // Restarts guard against an unlucky seeding; the lowest final SSE wins,
  // earliest restart on ties.
  for (int r = 0; r < kKMeansRestarts; ++r) {
    KMeansResult run = single_run(points, k, derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    if (r == 0 || run.sse_trace.back() < result.sse_trace.back()) result = std::move(run);
  }
  return result;
}

}  // namespace mlal::query
