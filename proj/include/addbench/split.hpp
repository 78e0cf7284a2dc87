// include/addbench/split.hpp

// Copyright 2026  The addbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "addbench/rng.hpp"

namespace addbench {

/// Held-out count for one class: floor(n * (1 - train_fraction)), kept
/// within [1, n - 1] so both sides see every class.
inline std::size_t held_out_count(std::size_t n, double train_fraction) {
  if (n < 2) return 0;
  auto v = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - train_fraction) + 1e-9));
  if (v < 1) v = 1;
  if (v > n - 1) v = n - 1;
  return v;
}

/// Seeded stratified split of item indices. `classes[i]` is the stratum of
/// item i (0 or 1). Returns (train, held-out), each sorted ascending.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int> &classes, double train_fraction, std::uint64_t seed) {
  std::vector<std::size_t> train, held;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == c) idx.push_back(i);
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(idx);
    const std::size_t h = held_out_count(idx.size(), train_fraction);
    held.insert(held.end(), idx.begin(), idx.begin() + static_cast<long>(h));
    train.insert(train.end(), idx.begin() + static_cast<long>(h), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(held.begin(), held.end());
  return {train, held};
}

}  // namespace addbench
