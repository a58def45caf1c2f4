// Copyright 2026 The Irony Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force phrase grouping and a generator of random valid forests.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "irony/parse.hpp"

namespace oracle {

// For every non-excluded token, walk head links to the root and bucket by
// root. Returns token indices per root, roots ascending, indices ascending.
inline std::vector<std::vector<int>> brute_force_groups(const irony::ParseForest& forest) {
  const int n = static_cast<int>(forest.tokens.size());
  std::map<int, std::vector<int>> buckets;
  for (const auto& tok : forest.tokens) {
    if (tok.head == 0) buckets[tok.index];
  }
  for (const auto& tok : forest.tokens) {
    if (tok.head == -1) continue;
    int cur = tok.index;
    for (int steps = 0; forest.tokens[cur - 1].head != 0; ++steps) {
      if (steps > n) return {};  // cycle: not a valid forest
      cur = forest.tokens[cur - 1].head;
    }
    buckets[cur].push_back(tok.index);
  }
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : buckets) {
    std::sort(members.begin(), members.end());
    out.push_back(members);
  }
  return out;
}

// n tokens, 1..min(5, n) roots, each other token excluded with probability
// 0.2, the rest attached to a random already-attached token.
inline irony::ParseForest random_forest(std::mt19937_64& rng, int max_tokens = 15, int max_roots = 5) {
  std::uniform_int_distribution<int> n_dist(1, max_tokens);
  const int n = n_dist(rng);
  std::uniform_int_distribution<int> r_dist(1, std::min(max_roots, n));
  const int n_roots = r_dist(rng);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);

  irony::ParseForest f;
  f.tokens.resize(n);
  for (int i = 0; i < n; ++i) f.tokens[i] = {i + 1, "w" + std::to_string(i + 1), -1};

  std::vector<int> attached(order.begin(), order.begin() + n_roots);
  for (int r : attached) f.tokens[r - 1].head = 0;
  std::bernoulli_distribution excluded(0.2);
  for (int k = n_roots; k < n; ++k) {
    const int tok = order[k];
    if (excluded(rng)) continue;
    std::uniform_int_distribution<std::size_t> pick(0, attached.size() - 1);
    f.tokens[tok - 1].head = attached[pick(rng)];
    attached.push_back(tok);
  }
  return f;
}

}  // namespace oracle
