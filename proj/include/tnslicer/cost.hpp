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

#ifndef TNSLICER_COST_HPP_
#define TNSLICER_COST_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tnslicer/big_count.hpp"
#include "tnslicer/common.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

/// Time and memory of a (possibly sliced) contraction. Totals are exact.
struct CostReport {
  BigCount time_total;           // Σ over internal nodes of 2^per_node_log2
  double log2_time_total = 0.0;
  int log2_memory_peak = 0;      // largest (residual) tree-edge rank
  std::vector<int> per_node_log2;
};

enum class Provenance { kFinder, kRefiner, kManual, kGreedy, kExhaustive };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kFinder: return "finder";
    case Provenance::kRefiner: return "refiner";
    case Provenance::kManual: return "manual";
    case Provenance::kGreedy: return "greedy";
    case Provenance::kExhaustive: return "exhaustive";
  }
  return "unknown";
}

struct SliceSet {
  IndexSet indices;
  int target_rank = 0;
  Provenance provenance = Provenance::kManual;

  std::size_t size() const { return indices.size(); }
};

/// Log2 time of one contraction: Σ log2_weight over s_left ∪ s_right ∪ s_out.
inline int node_cost(const ContractionTree& tree, const TreeNode& node) {
  return tree.network().rank(tree.node_indices(node));
}

inline CostReport tree_cost(const ContractionTree& tree) {
  CostReport r;
  for (const auto& n : tree.nodes()) {
    const int c = node_cost(tree, n);
    r.per_node_log2.push_back(c);
    r.time_total.add_pow2(static_cast<unsigned>(c));
  }
  r.log2_time_total = r.time_total.log2();
  for (int t = 0; t < tree.num_tree_edges(); ++t)
    r.log2_memory_peak = std::max(r.log2_memory_peak, tree.rank(t));
  return r;
}

inline void require_unit_sliced(const ContractionTree& tree, const IndexSet& sliced) {
  for (EdgeId e : sliced) {
    if (e >= tree.network().num_edges())
      throw ValidationError("sliced index id out of range");
    if (tree.network().weight(e) != 1)
      throw ValidationError("cannot slice index '" + tree.network().label(e) +
                            "' with log2_weight " + std::to_string(tree.network().weight(e)));
  }
}

/// Rank of a tree edge after removing the sliced indices it carries.
inline int residual_rank(const ContractionTree& tree, int tree_edge, const IndexSet& sliced) {
  return tree.rank(tree_edge) - sets::intersection_size(tree.indices(tree_edge), sliced);
}

/// Total cost over all 2^|S| subtasks: every node costs
/// 2^(rank(s_V) + |S| - |S ∩ s_V|). Does not require S to meet any target.
inline CostReport sliced_cost(const ContractionTree& tree, const IndexSet& sliced) {
  require_unit_sliced(tree, sliced);
  const int s = static_cast<int>(sliced.size());
  CostReport r;
  for (const auto& n : tree.nodes()) {
    const auto u = tree.node_indices(n);
    const int c = tree.network().rank(u) + s - sets::intersection_size(u, sliced);
    r.per_node_log2.push_back(c);
    r.time_total.add_pow2(static_cast<unsigned>(c));
  }
  r.log2_time_total = r.time_total.log2();
  for (int t = 0; t < tree.num_tree_edges(); ++t)
    r.log2_memory_peak = std::max(r.log2_memory_peak, residual_rank(tree, t, sliced));
  return r;
}

inline CostReport sliced_cost(const ContractionTree& tree, const SliceSet& s) {
  return sliced_cost(tree, s.indices);
}

/// True when every tree edge's residual rank is at most `target`.
inline bool meets_target(const ContractionTree& tree, const IndexSet& sliced, int target) {
  for (int t = 0; t < tree.num_tree_edges(); ++t)
    if (residual_rank(tree, t, sliced) > target) return false;
  return true;
}

/// Sliced cost over original cost. 1.0 for an empty slice set.
inline double overhead(const ContractionTree& tree, const IndexSet& sliced) {
  const auto base = tree_cost(tree).time_total;
  if (base.is_zero()) return 1.0;
  return ratio(sliced_cost(tree, sliced).time_total, base);
}

inline double overhead(const ContractionTree& tree, const SliceSet& s) {
  return overhead(tree, s.indices);
}

/// Per-node multiple 2^(|S| - |S ∩ s_V|), reported as the exponent.
inline std::vector<int> slice_multiples_log2(const ContractionTree& tree, const IndexSet& sliced) {
  std::vector<int> out;
  const int s = static_cast<int>(sliced.size());
  for (const auto& n : tree.nodes())
    out.push_back(s - sets::intersection_size(tree.node_indices(n), sliced));
  return out;
}

struct MemoryLevel {
  std::string name;
  double capacity_bytes = 0;
  double bandwidth_bytes_per_s = 0;  // transfer rate towards the next inner level
};

/// Memory hierarchy, outermost level first.
struct MemoryLevelModel {
  std::vector<MemoryLevel> levels;
  double peak_flops = 0;
  int element_bytes = 8;

  void validate() const {
    if (levels.size() < 2) throw ValidationError("memory model needs at least two levels");
    if (peak_flops <= 0 || element_bytes <= 0)
      throw ValidationError("memory model: peak_flops and element_bytes must be positive");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].capacity_bytes <= 0 || levels[i].bandwidth_bytes_per_s <= 0)
        throw ValidationError("memory level '" + levels[i].name + "' has a non-positive value");
      if (i > 0 && !(levels[i].capacity_bytes < levels[i - 1].capacity_bytes))
        throw ValidationError("memory capacities must strictly decrease from outer to inner");
    }
  }

  /// Largest rank whose tensor fits in the level.
  int rank_capacity(std::size_t level) const {
    const double elems = levels.at(level).capacity_bytes / element_bytes;
    if (elems < 1) return -1;
    return static_cast<int>(std::floor(std::log2(elems) + 1e-12));
  }
};

enum class Strategy { kSlice, kStack };

inline const char* to_string(Strategy s) { return s == Strategy::kSlice ? "slice" : "stack"; }

struct LevelAdvice {
  std::string outer;
  std::string inner;
  int inner_rank_capacity = 0;
  double bytes_moved = 0;
  double stacking_overhead = 1.0;  // equivalent overhead of moving the data
  double slicing_overhead = 0;     // best candidate that fits, +inf if none
  Strategy recommendation = Strategy::kStack;
};

/// Slicing-versus-stacking discriminant for each adjacent level pair.
///
/// Stacking keeps every tree edge above the inner level's rank capacity in
/// the outer level and streams it across once; the movement time is turned
/// into an equivalent overhead 1 + (bytes / bandwidth) / (flops / peak_flops).
/// Slicing uses the cheapest candidate whose target rank fits the inner level.
/// Stacking wins ties.
inline std::vector<LevelAdvice> advise_strategy(const MemoryLevelModel& model,
                                                const ContractionTree& tree,
                                                const std::vector<SliceSet>& candidates) {
  model.validate();
  if (candidates.empty()) throw ValidationError("advise_strategy: empty candidate list");
  const double flops_base = tree_cost(tree).time_total.to_double();
  std::vector<LevelAdvice> out;
  for (std::size_t i = 0; i + 1 < model.levels.size(); ++i) {
    LevelAdvice a;
    a.outer = model.levels[i].name;
    a.inner = model.levels[i + 1].name;
    a.inner_rank_capacity = model.rank_capacity(i + 1);
    for (int t = 0; t < tree.num_tree_edges(); ++t)
      if (tree.rank(t) > a.inner_rank_capacity)
        a.bytes_moved += std::ldexp(static_cast<double>(model.element_bytes), tree.rank(t));
    const double bw = model.levels[i].bandwidth_bytes_per_s;
    const double move_time = std::isinf(bw) ? 0.0 : a.bytes_moved / bw;
    const double compute_time = flops_base / model.peak_flops;
    a.stacking_overhead = 1.0 + (compute_time > 0 ? move_time / compute_time : 0.0);
    a.slicing_overhead = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates)
      if (c.target_rank <= a.inner_rank_capacity)
        a.slicing_overhead = std::min(a.slicing_overhead, overhead(tree, c));
    a.recommendation =
        a.stacking_overhead <= a.slicing_overhead ? Strategy::kStack : Strategy::kSlice;
    out.push_back(a);
  }
  return out;
}

}  // namespace tnslicer

#endif  // TNSLICER_COST_HPP_
