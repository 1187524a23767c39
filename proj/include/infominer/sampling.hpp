// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "infominer/corpus.hpp"
#include "infominer/rng.hpp"

namespace infominer {

/// In-place Fisher-Yates: for i = n-1 down to 1, swap(i, uniform_index(i+1)).
template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

template <typename T>
std::vector<T> shuffle(std::vector<T> items, Rng& rng) {
  shuffle_in_place(items, rng);
  return items;
}

/// Keeps every minority item and a uniform without-replacement subset of the
/// majority class of the same size, returned in shuffled order.
/// Throws SamplingError if either class is absent.
BinaryDataset undersample(const BinaryDataset& ds, Rng& rng);

struct SplitPair {
  BinaryDataset train;
  BinaryDataset validation;
};

/// Stratified split: each class contributes floor(ratio * n_class) items to
/// train and the remainder to validation. Both outputs keep input order.
SplitPair split(const BinaryDataset& ds, Rng& rng, double ratio = 0.8);

}  // namespace infominer
