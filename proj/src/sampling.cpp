// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "infominer/error.hpp"

namespace infominer {

namespace {

std::vector<std::size_t> indices_of_class(const BinaryDataset& ds, int cls) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    if (ds.items[i].cls == cls) idx.push_back(i);
  }
  return idx;
}

}  // namespace

BinaryDataset undersample(const BinaryDataset& ds, Rng& rng) {
  auto zeros = indices_of_class(ds, 0);
  auto ones = indices_of_class(ds, 1);
  if (zeros.empty() || ones.empty()) {
    throw SamplingError("degenerate label distribution for " +
                        std::string(label_key(ds.label)) + ": class " +
                        (zeros.empty() ? "0" : "1") + " is absent");
  }
  auto& minority = zeros.size() <= ones.size() ? zeros : ones;
  auto& majority = zeros.size() <= ones.size() ? ones : zeros;

  // The first n_min entries of a shuffled majority list form a uniform
  // without-replacement sample.
  shuffle_in_place(majority, rng);
  majority.resize(minority.size());

  std::vector<std::size_t> keep = minority;
  keep.insert(keep.end(), majority.begin(), majority.end());
  std::sort(keep.begin(), keep.end());
  shuffle_in_place(keep, rng);

  BinaryDataset out;
  out.label = ds.label;
  out.items.reserve(keep.size());
  for (auto i : keep) out.items.push_back(ds.items[i]);
  return out;
}

SplitPair split(const BinaryDataset& ds, Rng& rng, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw SamplingError("split ratio must lie in (0, 1)");
  }
  if (ds.size() < 2) {
    throw SamplingError("split needs at least 2 items for " +
                        std::string(label_key(ds.label)));
  }
  std::vector<bool> to_train(ds.size(), false);
  for (int cls : {0, 1}) {
    auto idx = indices_of_class(ds, cls);
    if (idx.empty()) {
      throw SamplingError("split needs both classes for " + std::string(label_key(ds.label)) +
                          ": class " + std::to_string(cls) + " is absent");
    }
    shuffle_in_place(idx, rng);
    const auto n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < n_train; ++k) to_train[idx[k]] = true;
  }

  SplitPair pair;
  pair.train.label = ds.label;
  pair.validation.label = ds.label;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (to_train[i] ? pair.train : pair.validation).items.push_back(ds.items[i]);
  }
  return pair;
}

}  // namespace infominer
