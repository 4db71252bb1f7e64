// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"
#include "doctest.h"

using namespace mlal;

namespace {

DatasetPool two_sample_pool() {
  DatasetPool pool;
  pool.num_classes = 2;
  pool.feature_dim = 1;
  pool.class_names = {"c0", "c1"};
  for (const char* id : {"a", "b"}) {
    pool.samples[id] = Sample{id, {0.0}, std::nullopt};
    pool.unlabeled.insert(id);
  }
  return pool;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kRuntime;
}

}  // namespace

TEST_CASE("move_to_labeled bookkeeping") {
  const DatasetPool pool = two_sample_pool();
  const DatasetPool moved = move_to_labeled(pool, {"a"}, {{"a", {1, 0}}});
  CHECK(moved.labeled == std::set<SampleId>{"a"});
  CHECK(moved.unlabeled == std::set<SampleId>{"b"});
  CHECK(moved.at("a").true_labels == LabelVector{1, 0});
  // input untouched
  CHECK(pool.labeled.empty());
  check_pool_invariants(moved);
}

TEST_CASE("move_to_labeled with no ids is the identity") {
  const DatasetPool pool = two_sample_pool();
  CHECK(move_to_labeled(pool, {}, {}) == pool);
}

TEST_CASE("move_to_labeled rejects bad requests") {
  const DatasetPool pool = two_sample_pool();
  CHECK(code_of([&] { move_to_labeled(pool, {"zz"}, {{"zz", {1, 0}}}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { move_to_labeled(pool, {"a"}, {}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { move_to_labeled(pool, {"a"}, {{"a", {0, 0}}}); }) == ErrorCode::kData);
  CHECK(code_of([&] { move_to_labeled(pool, {"a"}, {{"a", {1, 0, 1}}}); }) == ErrorCode::kData);
  CHECK(code_of([&] { move_to_labeled(pool, {"a"}, {{"a", {2, 0}}}); }) == ErrorCode::kData);
  const DatasetPool once = move_to_labeled(pool, {"a"}, {{"a", {1, 0}}});
  CHECK_THROWS_AS(move_to_labeled(once, {"a"}, {{"a", {1, 0}}}), Error);
}

TEST_CASE("threshold is strict") {
  CHECK(threshold_predictions(std::vector<double>{0.9, 0.2}) == LabelVector{1, 0});
  CHECK(threshold_predictions(std::vector<double>{0.5, 0.5}) == LabelVector{0, 0});
  CHECK(threshold_predictions(std::vector<double>{0.51, 0.49, 1.0}) == LabelVector{1, 0, 1});
}

TEST_CASE("micro F1 examples") {
  CHECK(micro_f1({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}) == 1.0);
  CHECK(micro_f1({{1, 0}, {0, 1}}, {{1, 1}, {0, 1}}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(micro_f1({{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}) == 0.0);
  CHECK(micro_f1({{0, 0}}, {{0, 0}}) == 1.0);
}

TEST_CASE("macro F1 examples") {
  const MacroF1 m = macro_f1({{1, 0}, {1, 0}}, {{1, 0}, {0, 1}});
  REQUIRE(m.per_class.size() == 2);
  CHECK(m.per_class[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.per_class[1] == 0.0);
  CHECK(m.macro == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const MacroF1 vacuous = macro_f1({{0}}, {{0}});
  CHECK(vacuous.per_class == std::vector<double>{1.0});
  CHECK(vacuous.macro == 1.0);
  CHECK(macro_f1({{1, 1}, {0, 1}}, {{1, 1}, {0, 1}}).macro == 1.0);
}

TEST_CASE("metric shape mismatch is rejected") {
  CHECK_THROWS_AS(micro_f1({{1, 0}}, {{1, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(macro_f1({{1, 0, 1}}, {{1, 0}}), Error);
}

TEST_CASE("metric properties on random matrices") {
  Rng rng(99);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7, c = 1 + trial % 4;
    BinaryMatrix pred(n, LabelVector(c)), truth(n, LabelVector(c));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        pred[i][j] = coin(rng);
        truth[i][j] = coin(rng);
      }
    }
    const double micro = micro_f1(pred, truth);
    const MacroF1 macro = macro_f1(pred, truth);
    CHECK(micro >= 0.0);
    CHECK(micro <= 1.0);
    CHECK(macro.macro >= 0.0);
    CHECK(macro.macro <= 1.0);
    CHECK(micro_f1(truth, truth) == 1.0);

    // row permutation leaves both metrics unchanged
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    BinaryMatrix pp, tp;
    for (auto i : order) {
      pp.push_back(pred[i]);
      tp.push_back(truth[i]);
    }
    CHECK(micro_f1(pp, tp) == micro);
    CHECK(macro_f1(pp, tp).macro == macro.macro);

    if (c == 1) CHECK(micro == doctest::Approx(macro.macro).epsilon(1e-15));
  }
}

TEST_CASE("derived seeds are stable and stream separated") {
  CHECK(derive_seed(1, Stream::kTrain, 3) == derive_seed(1, Stream::kTrain, 3));
  CHECK(derive_seed(1, Stream::kTrain, 3) != derive_seed(1, Stream::kTrain, 4));
  CHECK(derive_seed(1, Stream::kTrain, 3) != derive_seed(1, Stream::kQuery, 3));
  CHECK(derive_seed(1, Stream::kTrain, 3) != derive_seed(2, Stream::kTrain, 3));
}

TEST_CASE("sample_without_replacement draws distinct items") {
  std::vector<int> items{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Rng rng(5);
  auto draw = sample_without_replacement(items, 4, rng);
  CHECK(draw.size() == 4);
  std::sort(draw.begin(), draw.end());
  CHECK(std::adjacent_find(draw.begin(), draw.end()) == draw.end());
  Rng rng2(5);
  CHECK(sample_without_replacement(items, 20, rng2).size() == 10);
}
