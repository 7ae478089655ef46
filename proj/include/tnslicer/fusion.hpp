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

// Fused multi-step kernels for a main memory / scratchpad pair.
//
// A group of consecutive stem steps runs as one kernel: the stem tensor is
// split along a few secondary-sliced indices that stay alive through the
// whole group, each piece is loaded into the scratchpad once, pushed through
// every step of the group and written back once.

#ifndef TNSLICER_FUSION_HPP_
#define TNSLICER_FUSION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tnslicer/cost.hpp"
#include "tnslicer/lifetime.hpp"
#include "tnslicer/permutation.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

/// Steps first_step..last_step, reading stem tensor first_step and writing
/// stem tensor last_step + 1.
struct FusedGroup {
  int first_step = 0;
  int last_step = 0;
  IndexSet secondary_slices;
  int resident_rank = 0;  // largest residual rank held in the scratchpad
  int load_rank = 0;      // rank of the stem tensor read from main memory
  int store_rank = 0;     // rank of the stem tensor written back
  std::uint64_t subtasks = 1;

  int length() const { return last_step - first_step + 1; }
  int transfers_in() const { return 1; }   // per subtask
  int transfers_out() const { return 1; }  // per subtask
};

struct FusedPlan {
  std::vector<FusedGroup> groups;
  int capacity = 13;
  IndexSet process_slices;
  int steps = 0;
  int dma_saved = 0;

  std::vector<std::uint64_t> subtask_counts() const {
    std::vector<std::uint64_t> out;
    for (const auto& g : groups) out.push_back(g.subtasks);
    return out;
  }
  int baseline_transfers() const { return 2 * steps; }
  int fused_transfers() const { return 2 * static_cast<int>(groups.size()); }
};

/// Greedy left-to-right grouping.
///
/// At group start i the candidates are the unsliced unit-weight indices alive
/// at stem position i, longest remaining interval first (ties by id). The
/// group [i, j] is feasible when at least max(rank - c) over stem tensors
/// i..j+1 candidates are still alive at j + 1; j grows while that holds and
/// the group takes exactly that many slices. Ranks are residual with respect
/// to `process_slices`.
inline FusedPlan plan_fusion(const ContractionTree& tree, const Stem& stem,
                             const StemIntervals& intervals, int capacity = 13,
                             const IndexSet& process_slices = {}) {
  if (capacity < 1) throw ValidationError("plan_fusion: capacity must be >= 1");
  require_unit_sliced(tree, process_slices);
  const auto& net = tree.network();
  FusedPlan plan;
  plan.capacity = capacity;
  plan.process_slices = process_slices;
  plan.steps = stem.steps();

  std::vector<int> res;
  for (int t : stem.tensors) res.push_back(residual_rank(tree, t, process_slices));

  int i = 0;
  while (i < plan.steps) {
    std::vector<std::pair<int, EdgeId>> cand;  // (-last, id)
    for (const auto& [e, iv] : intervals) {
      if (iv.first > i || iv.last < i) continue;
      if (sets::contains(process_slices, e) || net.weight(e) != 1) continue;
      cand.emplace_back(-iv.last, e);
    }
    std::sort(cand.begin(), cand.end());
    auto need = [&](int j) {
      int k = 0;
      for (int p = i; p <= j + 1; ++p) k = std::max(k, res[p] - capacity);
      return k;
    };
    auto alive_through = [&](int j) {
      int n = 0;
      for (const auto& c : cand)
        if (-c.first >= j + 1) ++n;
      return n;
    };
    if (alive_through(i) < need(i))
      throw InfeasibleError("plan_fusion: step " + std::to_string(i) + " needs " +
                            std::to_string(need(i)) + " secondary slices but only " +
                            std::to_string(alive_through(i)) +
                            " sliceable indices survive it (capacity " +
                            std::to_string(capacity) + ")");
    int j = i;
    while (j + 1 < plan.steps && alive_through(j + 1) >= need(j + 1)) ++j;

    FusedGroup g;
    g.first_step = i;
    g.last_step = j;
    const int k = need(j);
    for (int s = 0; s < k; ++s) g.secondary_slices.push_back(cand[s].second);
    std::sort(g.secondary_slices.begin(), g.secondary_slices.end());
    for (int p = i; p <= j + 1; ++p) g.resident_rank = std::max(g.resident_rank, res[p] - k);
    g.load_rank = res[i];
    g.store_rank = res[j + 1];
    g.subtasks = std::uint64_t{1} << k;
    plan.dma_saved += 2 * (g.length() - 1);
    plan.groups.push_back(std::move(g));
    i = j + 1;
  }
  return plan;
}

/// Empty string when the plan is consistent with the tree, else a reason.
inline std::string check_fusion_plan(const ContractionTree& tree, const Stem& stem,
                                     const FusedPlan& plan) {
  int expect = 0;
  for (const auto& g : plan.groups) {
    if (g.first_step != expect || g.last_step < g.first_step)
      return "groups are not contiguous at step " + std::to_string(expect);
    expect = g.last_step + 1;
    for (int s = g.first_step; s <= g.last_step; ++s) {
      const auto& node = tree.producer(stem.tensors[s + 1]);
      if (sets::intersection_size(tree.contracted(node), g.secondary_slices) > 0)
        return "a secondary slice is contracted at step " + std::to_string(s);
    }
    for (int p = g.first_step; p <= g.last_step + 1; ++p) {
      const auto& s = tree.indices(stem.tensors[p]);
      const int r = tree.network().rank(s) - sets::intersection_size(s, plan.process_slices) -
                    sets::intersection_size(s, g.secondary_slices);
      if (r > plan.capacity) return "stem position " + std::to_string(p) + " exceeds capacity";
      if (sets::intersection_size(s, g.secondary_slices) !=
          static_cast<int>(g.secondary_slices.size()))
        return "a secondary slice is not alive at stem position " + std::to_string(p);
    }
  }
  if (expect != plan.steps) return "groups do not cover the stem";
  return {};
}

struct FusedCostReport {
  double flops = 0;
  double bytes_moved = 0;
  double arithmetic_intensity = 0;
  double baseline_bytes_moved = 0;
  double baseline_arithmetic_intensity = 0;
  double compute_bound_threshold = 0;  // flops per byte at the balance point
  bool compute_bound = false;
  bool degenerate = false;  // no flops or no traffic
  int workers = 64;
  std::vector<double> subtasks_per_worker;
};

/// Roofline view of a fused plan. Flops are the stem's per-node costs after
/// process slicing; traffic is one load and one store of every group
/// boundary tensor (rounded up to `granularity_bytes` per transfer and
/// repeated per subtask). The baseline moves the stem tensor in and out at
/// every step. Uses the innermost pair of levels.
inline FusedCostReport fused_cost_model(const ContractionTree& tree, const Stem& stem,
                                        const FusedPlan& plan, const MemoryLevelModel& model,
                                        double granularity_bytes = 1, int workers = 64) {
  model.validate();
  if (granularity_bytes < 1) throw ValidationError("fused_cost_model: granularity must be >= 1");
  if (workers < 1) throw ValidationError("fused_cost_model: workers must be >= 1");
  FusedCostReport r;
  r.workers = workers;
  const double eb = model.element_bytes;
  auto bytes = [&](int rank, int sliced) {
    const double raw = std::ldexp(eb, rank - sliced);
    return std::ceil(raw / granularity_bytes) * granularity_bytes * std::ldexp(1.0, sliced);
  };
  std::vector<int> res;
  for (int t : stem.tensors) res.push_back(residual_rank(tree, t, plan.process_slices));
  for (int s = 0; s < stem.steps(); ++s) {
    const auto& node = tree.producer(stem.tensors[s + 1]);
    const auto u = tree.node_indices(node);
    const int c = tree.network().rank(u) - sets::intersection_size(u, plan.process_slices);
    r.flops += std::ldexp(1.0, c);
    r.baseline_bytes_moved += bytes(res[s], 0) + bytes(res[s + 1], 0);
  }
  for (const auto& g : plan.groups) {
    const int k = static_cast<int>(g.secondary_slices.size());
    r.bytes_moved += bytes(g.load_rank, k) + bytes(g.store_rank, k);
    r.subtasks_per_worker.push_back(static_cast<double>(g.subtasks) / workers);
  }
  const double bw = model.levels[model.levels.size() - 2].bandwidth_bytes_per_s;
  r.compute_bound_threshold = model.peak_flops / bw;
  r.degenerate = r.flops == 0 || r.bytes_moved == 0;
  if (!r.degenerate) {
    r.arithmetic_intensity = r.flops / r.bytes_moved;
    r.baseline_arithmetic_intensity = r.flops / r.baseline_bytes_moved;
    r.compute_bound = r.arithmetic_intensity >= r.compute_bound_threshold;
  }
  return r;
}

}  // namespace tnslicer

#endif  // TNSLICER_FUSION_HPP_
