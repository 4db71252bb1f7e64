// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>

#include "core/error.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "query/query.hpp"

using namespace mlal;
using namespace mlal::query;

namespace {

nn::ForwardTrace trace_of(std::vector<double> h, std::vector<double> p) {
  nn::ForwardTrace t;
  t.activations = {h, std::move(h), std::move(p)};
  return t;
}

double logit(double p) { return std::log(p / (1 - p)); }

// Single affine layer with zero weights: outputs sigmoid(bias) everywhere.
nn::NetworkParams constant_net(const std::vector<double>& probs, std::size_t d = 2) {
  nn::NetworkParams net;
  nn::DenseLayer l;
  l.weight = nn::Matrix(probs.size(), d);
  for (double p : probs) l.bias.push_back(logit(p));
  net.layers.push_back(l);
  return net;
}

DatasetPool unlabeled_pool(std::size_t n, std::size_t d, std::uint64_t seed) {
  DatasetPool pool;
  pool.num_classes = 3;
  pool.feature_dim = d;
  pool.class_names = {"a", "b", "c"};
  Rng rng(seed);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "u%03zu", i);
    std::vector<double> f(d);
    for (auto& v : f) v = g(rng);
    pool.samples[id] = Sample{id, f, LabelVector{1, 0, 0}};
    pool.unlabeled.insert(id);
  }
  return pool;
}

std::vector<const Sample*> pointers(const DatasetPool& pool) {
  std::vector<const Sample*> out;
  for (const auto& id : pool.unlabeled) out.push_back(&pool.at(id));
  return out;
}

ScoredSample scored(std::string id, double score, std::vector<double> e) {
  return ScoredSample{std::move(id), score, std::move(e)};
}

}  // namespace

TEST_CASE("gradient embedding examples") {
  const auto g = gradient_embedding(trace_of({1.0, 1.0}, {0.9, 0.2}));
  REQUIRE(g.residual.size() == 2);
  CHECK(g.residual[0] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(g.residual[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g.norm() == doctest::Approx(std::sqrt(0.15)).epsilon(1e-12));
  CHECK(g.norm() == doctest::Approx(0.387298).epsilon(1e-6));

  const auto half = gradient_embedding(trace_of({1.0}, {0.5, 0.5, 0.5}));
  CHECK(half.residual == std::vector<double>{0.5, 0.5, 0.5});

  const auto sure = gradient_embedding(trace_of({3.0, 4.0}, {1.0, 0.0}));
  CHECK(sure.norm() == 0.0);

  const auto no_bias = gradient_embedding(trace_of({1.0, 1.0}, {0.9, 0.2}), false);
  CHECK(no_bias.norm() == doctest::Approx(std::sqrt(0.05) * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("MGE agrees with the explicit gradient matrix and finite differences") {
  Rng rng(31);
  std::uniform_int_distribution<int> dim(1, 6), cls(1, 4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 60; ++i) {
    const nn::Architecture arch{static_cast<std::size_t>(dim(rng)), {static_cast<std::size_t>(dim(rng))},
                                static_cast<std::size_t>(cls(rng)), 0};
    const auto net = nn::init_network(arch, rng);
    std::vector<double> x(arch.input_dim);
    for (auto& v : x) v = g(rng);
    const auto t = nn::forward(net, x, false);
    const double mge = gradient_embedding(t).norm();
    const double explicit_norm = oracle::norm(oracle::explicit_last_layer_gradient(t, true));
    CHECK(std::abs(mge - explicit_norm) <= 1e-12 * std::max(explicit_norm, 1e-300));
    const double fd = oracle::fd_last_layer_gradient_norm(net, x);
    CHECK(std::abs(mge - fd) <= 1e-5 * mge);
  }
}

TEST_CASE("MGE score bound") {
  Rng rng(32);
  const auto pool = unlabeled_pool(50, 4, 1);
  const auto net = nn::init_network(nn::Architecture{4, {6}, 3, 0}, rng);
  for (const auto& s : score_mge(net, pointers(pool))) {
    const auto t = nn::forward(net, pool.at(s.id).features, false);
    double h2 = 0;
    for (double v : t.penultimate()) h2 += v * v;
    CHECK(s.score <= 0.5 * std::sqrt(3.0) * std::sqrt(h2 + 1.0));
    CHECK(s.embedding == std::vector<double>(t.penultimate().begin(), t.penultimate().end()));
  }
}

TEST_CASE("LL scores are the head outputs") {
  Rng rng(33);
  const auto pool = unlabeled_pool(10, 4, 2);
  const auto net = nn::init_network(nn::Architecture{4, {5}, 3, 4}, rng);
  for (const auto& s : score_ll(net, pointers(pool))) {
    CHECK(s.score == *nn::forward(net, pool.at(s.id).features, true).head_value);
  }
  auto zero = nn::zeros_like(net);
  for (const auto& s : score_ll(zero, pointers(pool))) CHECK(s.score == 0.0);

  auto no_head = net;
  no_head.head.reset();
  CHECK_THROWS_AS(score_ll(no_head, pointers(pool)), Error);

  std::vector<ScoredSample> two{scored("second", 0.3, {}), scored("first", 0.7, {})};
  rank_by_score(two);
  CHECK(two.front().id == "first");
}

TEST_CASE("TPD examples") {
  const auto pool = unlabeled_pool(5, 2, 3);
  const auto now = constant_net({0.9, 0.1});
  const auto prev = constant_net({0.6, 0.5});
  const auto scores = score_tpd(now, &prev, pointers(pool));
  REQUIRE(scores.has_value());
  for (const auto& s : *scores) CHECK(s.score == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(34);
  const auto net = nn::init_network(nn::Architecture{2, {4}, 3, 0}, rng);
  for (const auto& s : *score_tpd(net, &net, pointers(pool))) CHECK(s.score == 0.0);

  CHECK_FALSE(score_tpd(net, nullptr, pointers(pool)).has_value());
}

TEST_CASE("kmeans examples") {
  const std::vector<std::vector<double>> four{{0, 0}, {0.1, 0}, {10, 10}, {10, 10.1}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = kmeans_pp(four, 2, seed);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[2] == r.assignment[3]);
    CHECK(r.assignment[0] != r.assignment[2]);
    CHECK(oracle::best_partition(four, 2) == std::vector<int>{0, 0, 1, 1});
  }

  const auto one = kmeans_pp(four, 1, 5);
  CHECK(one.num_clusters() == 1);
  CHECK(one.centers[0][0] == doctest::Approx(5.025));
  CHECK(one.centers[0][1] == doctest::Approx(5.025));

  const auto singles = kmeans_pp(four, 4, 5);
  std::set<std::size_t> distinct(singles.assignment.begin(), singles.assignment.end());
  CHECK(distinct.size() == 4);
  CHECK(singles.sse_trace.back() == 0.0);
}

TEST_CASE("kmeans deficit gives one cluster per distinct point") {
  const std::vector<std::vector<double>> pts{{1, 1}, {2, 2}, {1, 1}, {2, 2}, {1, 1}};
  const auto r = kmeans_pp(pts, 3, 9);
  CHECK(r.deficit);
  CHECK(r.num_clusters() == 2);
  CHECK(r.assignment == std::vector<std::size_t>{0, 1, 0, 1, 0});
  CHECK_THROWS_AS(kmeans_pp(pts, 0, 1), Error);
}

TEST_CASE("Lloyd never increases SSE") {
  Rng rng(35);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> pts(40, std::vector<double>(3));
    for (auto& p : pts) {
      for (auto& v : p) v = g(rng);
    }
    const auto r = kmeans_pp(pts, 5, trial);
    for (std::size_t i = 1; i < r.sse_trace.size(); ++i) CHECK(r.sse_trace[i] <= r.sse_trace[i - 1] + 1e-12);
    CHECK(r.sse_trace.back() == doctest::Approx(within_cluster_sse(pts, r.assignment)));
    CHECK(r.lloyd_iterations <= kMaxLloydIterations);
  }
}

TEST_CASE("kmeans lands near the brute-force optimum on small inputs") {
  Rng rng(36);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 300;
  int close = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 4 + rng() % 7;
    const int k = 2 + static_cast<int>(rng() % 2);
    std::vector<std::vector<double>> pts(n, std::vector<double>(1 + rng() % 3));
    for (auto& p : pts) {
      for (auto& v : p) v = u(rng);
    }
    const double found = within_cluster_sse(pts, kmeans_pp(pts, k, trial).assignment);
    const double best = oracle::sse_of(pts, oracle::best_partition(pts, k), k);
    close += found <= 1.2 * best + 1e-12;
  }
  MESSAGE(close << " of " << trials << " within 20% of optimum");
  CHECK(close >= trials * 90 / 100);
}

TEST_CASE("diversity selection examples") {
  const std::vector<ScoredSample> four{scored("p1", 0.9, {0, 0}), scored("p2", 0.5, {0.1, 0}),
                                       scored("p3", 0.3, {10, 10}), scored("p4", 0.7, {10, 10.1})};
  CHECK(diversity_select(four, 2, 1) == std::vector<SampleId>{"p1", "p4"});
  CHECK(diversity_select(four, 4, 1) == std::vector<SampleId>{"p1", "p4", "p2", "p3"});

  const std::vector<ScoredSample> same{scored("a", 0.1, {1, 1}), scored("b", 0.8, {1, 1}),
                                       scored("c", 0.5, {1, 1})};
  CHECK(diversity_select(same, 2, 3) == std::vector<SampleId>{"b", "c"});

  const std::vector<ScoredSample> tie{scored("z", 0.5, {0}), scored("y", 0.5, {0.01}),
                                      scored("x", 0.2, {100})};
  CHECK(diversity_select(tie, 2, 4) == std::vector<SampleId>{"y", "x"});
  CHECK_THROWS_AS(diversity_select(tie, 4, 4), Error);
}

TEST_CASE("diversity selection matches the exhaustive reference") {
  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t b = 0;
    const auto instance = oracle::random_selection_instance(rng, b);
    INFO("trial " << trial << " n=" << instance.size() << " b=" << b);
    CHECK(diversity_select(instance, b, trial) == oracle::diversity_select(instance, b));
  }
}

TEST_CASE("select_batch pipeline") {
  const auto pool = unlabeled_pool(30, 4, 4);
  Rng rng(38);
  const auto net = nn::init_network(nn::Architecture{4, {6}, 3, 4}, rng);

  QuerySpec spec;
  spec.budget = 5;
  spec.seed = 3;

  SUBCASE("no diversity and m=1 is the top-b ranking") {
    spec.diversity = false;
    spec.multiplier = 1;
    auto all = score_mge(net, pointers(pool));
    rank_by_score(all);
    const auto r = select_batch(spec, net, nullptr, pool, 1);
    REQUIRE(r.ids.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(r.ids[i] == all[i].id);
      CHECK(r.scores[i] == all[i].score);
    }
    CHECK(r.candidates.size() == 30);
  }

  SUBCASE("diversity picks one per cluster inside the top m*b") {
    spec.multiplier = 3;
    auto all = score_mge(net, pointers(pool));
    rank_by_score(all);
    std::vector<ScoredSample> top(all.begin(), all.begin() + 15);
    const auto r = select_batch(spec, net, nullptr, pool, 2);
    CHECK(r.ids.size() == 5);
    std::set<SampleId> allowed;
    for (const auto& s : top) allowed.insert(s.id);
    for (const auto& id : r.ids) CHECK(allowed.count(id) == 1);
    CHECK(r.ids == diversity_select(top, 5, derive_seed(spec.seed, Stream::kCluster, 2)));
    const auto clusters = kmeans_pp([&] {
      std::vector<std::vector<double>> e;
      for (const auto& s : top) e.push_back(s.embedding);
      return e;
    }(), 5, derive_seed(spec.seed, Stream::kCluster, 2));
    std::set<std::size_t> used;
    for (const auto& id : r.ids) {
      for (std::size_t i = 0; i < top.size(); ++i) {
        if (top[i].id == id) used.insert(clusters.assignment[i]);
      }
    }
    CHECK(used.size() == clusters.num_clusters());
  }

  SUBCASE("small pools are taken whole") {
    DatasetPool tiny = unlabeled_pool(3, 4, 5);
    for (auto u : {Uncertainty::kMGE, Uncertainty::kLL, Uncertainty::kRandom}) {
      spec.uncertainty = u;
      auto r = select_batch(spec, net, &net, tiny, 1);
      std::sort(r.ids.begin(), r.ids.end());
      CHECK(r.ids == std::vector<SampleId>(tiny.unlabeled.begin(), tiny.unlabeled.end()));
    }
  }

  SUBCASE("TPD without a previous model is the uniform draw") {
    spec.uncertainty = Uncertainty::kTPD;
    const auto r = select_batch(spec, net, nullptr, pool, 1);
    CHECK(r.uniform_draw);
    CHECK(r.ids == uniform_draw(pool, 5, spec.seed, 1));
    for (double s : r.scores) CHECK(std::isnan(s));
  }
}

TEST_CASE("strategy names") {
  CHECK(parse_uncertainty("mge") == Uncertainty::kMGE);
  CHECK(parse_uncertainty("Random") == Uncertainty::kRandom);
  CHECK_THROWS_AS(parse_uncertainty("entropy"), Error);
  QuerySpec spec;
  CHECK(spec.label() == "MGE+Clustering");
  spec.uncertainty = Uncertainty::kLL;
  spec.diversity = false;
  CHECK(spec.label() == "LL");
  spec.uncertainty = Uncertainty::kRandom;
  CHECK(spec.label() == "Random");
}
