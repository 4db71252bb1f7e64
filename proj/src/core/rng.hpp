// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mlal {

/// Random streams are never carried across iterations. Each consumer derives
/// its own generator from (seed, iteration, stream tag), so a checkpoint only
/// needs the experiment seed to resume bit-exactly.
enum class Stream : std::uint64_t {
  kInit = 1,
  kTrain = 2,
  kQuery = 3,
  kCluster = 4,
  kInitialDraw = 5,
  kSynthetic = 6,
  kSplit = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t iteration = 0) {
  return derive_seed(seed, {static_cast<std::uint64_t>(stream), iteration});
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t iteration = 0) {
  return Rng(derive_seed(seed, stream, iteration));
}

/// Uniform draw of `k` distinct elements, in draw order.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k, Rng& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(k);
  return items;
}

}  // namespace mlal
