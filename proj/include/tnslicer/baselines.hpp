// Copyright 2026 The tn-slicer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Comparison baselines and brute-force oracles for the slicers.

#ifndef TNSLICER_BASELINES_HPP_
#define TNSLICER_BASELINES_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tnslicer/big_count.hpp"
#include "tnslicer/cost.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

/// Indices that can help meet `target`: unit-weight indices carried by at
/// least one tensor above the target.
inline IndexSet slicing_candidates(const ContractionTree& tree, int target) {
  IndexSet out;
  for (int t = 0; t < tree.num_tree_edges(); ++t)
    if (tree.rank(t) > target) out = sets::set_union(out, tree.indices(t));
  std::erase_if(out, [&](EdgeId e) { return tree.network().weight(e) != 1; });
  return out;
}

/// Repeatedly slices the single index that minimizes the total sliced cost
/// until every tensor fits; ties go to the smaller id.
inline SliceSet greedy_slicer(const ContractionTree& tree, int target) {
  if (target < 1) throw ValidationError("greedy_slicer: target rank must be >= 1");
  IndexSet sliced;
  while (!meets_target(tree, sliced, target)) {
    IndexSet pool;
    for (int t = 0; t < tree.num_tree_edges(); ++t)
      if (residual_rank(tree, t, sliced) > target)
        pool = sets::set_union(pool, tree.indices(t));
    pool = sets::difference(pool, sliced);
    std::erase_if(pool, [&](EdgeId e) { return tree.network().weight(e) != 1; });
    if (pool.empty()) throw InfeasibleError("greedy_slicer: index pool exhausted");
    EdgeId best = pool.front();
    BigCount best_cost;
    bool first = true;
    for (EdgeId e : pool) {
      IndexSet trial = sliced;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), e), e);
      const auto c = sliced_cost(tree, trial).time_total;
      if (first || c < best_cost) {
        best = e;
        best_cost = c;
        first = false;
      }
    }
    sliced.insert(std::upper_bound(sliced.begin(), sliced.end(), best), best);
  }
  return SliceSet{sliced, target, Provenance::kGreedy};
}

struct LandscapeEntry {
  IndexSet indices;
  BigCount cost;
  double overhead = 1.0;
};

struct ExhaustiveResult {
  SliceSet optimum;
  BigCount optimum_cost;
  double optimum_overhead = 1.0;
  IndexSet pool;
  /// Every subset of the pool that meets the target, in (size, lexicographic) order.
  std::vector<LandscapeEntry> landscape;
};

/// Enumerates all subsets of the candidate pool by size. Subsets failing the
/// rank-count constraint |S ∩ s_T| >= rank(T) - target are skipped before
/// costing. The optimum is the cheapest valid subset, ties to smaller size
/// then smaller ids.
inline ExhaustiveResult exhaustive_slicer(const ContractionTree& tree, int target,
                                          int max_pool = 14) {
  if (target < 1) throw ValidationError("exhaustive_slicer: target rank must be >= 1");
  ExhaustiveResult res;
  res.pool = slicing_candidates(tree, target);
  const int p = static_cast<int>(res.pool.size());
  if (p > max_pool)
    throw ValidationError("exhaustive_slicer: pool of " + std::to_string(p) +
                          " candidate indices exceeds the limit of " + std::to_string(max_pool));
  const BigCount base = tree_cost(tree).time_total;

  std::vector<int> need;  // per oversized tensor: required hits and its pool mask
  std::vector<std::uint32_t> masks;
  for (int t = 0; t < tree.num_tree_edges(); ++t) {
    const int excess = tree.rank(t) - target;
    if (excess <= 0) continue;
    std::uint32_t m = 0;
    for (int i = 0; i < p; ++i)
      if (sets::contains(tree.indices(t), res.pool[i])) m |= 1u << i;
    need.push_back(excess);
    masks.push_back(m);
  }

  bool found = false;
  for (int k = 0; k <= p; ++k) {
    // Gosper's hack over k-subsets.
    std::uint64_t subset = k == 0 ? 0 : (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = std::uint64_t{1} << p;
    std::vector<std::uint64_t> level;
    while (subset < limit) {
      level.push_back(subset);
      if (k == 0) break;
      const std::uint64_t c = subset & (~subset + 1);
      const std::uint64_t r = subset + c;
      subset = (((r ^ subset) >> 2) / c) | r;
    }
    std::vector<LandscapeEntry> entries;
    for (std::uint64_t m : level) {
      bool ok = true;
      for (std::size_t j = 0; j < need.size() && ok; ++j)
        ok = std::popcount(static_cast<std::uint32_t>(m) & masks[j]) >= need[j];
      if (!ok) continue;
      LandscapeEntry e;
      for (int i = 0; i < p; ++i)
        if (m >> i & 1) e.indices.push_back(res.pool[i]);
      e.cost = sliced_cost(tree, e.indices).time_total;
      e.overhead = base.is_zero() ? 1.0 : ratio(e.cost, base);
      entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(),
              [](const LandscapeEntry& a, const LandscapeEntry& b) { return a.indices < b.indices; });
    for (auto& e : entries) {
      if (!found || e.cost < res.optimum_cost) {
        res.optimum = SliceSet{e.indices, target, Provenance::kExhaustive};
        res.optimum_cost = e.cost;
        res.optimum_overhead = e.overhead;
        found = true;
      }
      res.landscape.push_back(std::move(e));
    }
  }
  if (!found) throw InfeasibleError("exhaustive_slicer: no subset of the pool meets the target");
  return res;
}

struct SmallerSetAudit {
  int sets_checked = 0;        // valid n-sets S1 meeting the hypotheses
  int counterexamples = 0;     // no valid (n-1)-set with overhead <= overhead(S1)
  int strict_failures = 0;     // no valid (n-1)-set with overhead strictly below
  std::vector<IndexSet> examples;  // first few counterexamples
};

/// Checks, over a full landscape, that whenever a valid n-set S1 and a valid
/// (n-1)-set S2 with S1 ∩ S2 != ∅ exist, some valid (n-1)-set costs no more
/// than S1.
inline SmallerSetAudit audit_smaller_set(const ExhaustiveResult& ex) {
  SmallerSetAudit audit;
  std::size_t max_size = 0;
  for (const auto& e : ex.landscape) max_size = std::max(max_size, e.indices.size());
  for (std::size_t n = 2; n <= max_size; ++n) {
    std::vector<const LandscapeEntry*> big, small;
    for (const auto& e : ex.landscape) {
      if (e.indices.size() == n) big.push_back(&e);
      if (e.indices.size() == n - 1) small.push_back(&e);
    }
    if (small.empty()) continue;
    const auto cheapest = std::min_element(small.begin(), small.end(), [](auto* a, auto* b) {
      return a->cost < b->cost;
    });
    for (const auto* s1 : big) {
      const bool hypothesis = std::any_of(small.begin(), small.end(), [&](auto* s2) {
        return sets::intersection_size(s1->indices, s2->indices) > 0;
      });
      if (!hypothesis) continue;
      ++audit.sets_checked;
      if ((*cheapest)->cost > s1->cost) {
        ++audit.counterexamples;
        if (audit.examples.size() < 5) audit.examples.push_back(s1->indices);
      }
      if (!((*cheapest)->cost < s1->cost)) ++audit.strict_failures;
    }
  }
  return audit;
}

}  // namespace tnslicer

#endif  // TNSLICER_BASELINES_HPP_
