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

#ifndef TNSLICER_REFINE_HPP_
#define TNSLICER_REFINE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "tnslicer/big_count.hpp"
#include "tnslicer/cost.hpp"
#include "tnslicer/lifetime.hpp"
#include "tnslicer/rng.hpp"

namespace tnslicer {

struct AnnealConfig {
  double t_initial = 1.0;
  double t_final = 1e-3;
  double alpha = 0.95;
  std::uint64_t seed = 0;
  int max_outer_iters = 100000;

  void validate() const {
    if (!(t_initial > 0) || !(t_final > 0))
      throw ValidationError("anneal: temperatures must be positive");
    if (!(t_final < t_initial)) throw ValidationError("anneal: t_final must be below t_initial");
    if (!(alpha > 0 && alpha < 1)) throw ValidationError("anneal: alpha must lie in (0, 1)");
    if (max_outer_iters < 0) throw ValidationError("anneal: max_outer_iters must be >= 0");
  }
};

/// exp((c_ori - c_new) / c_ori / temperature), capped at 1.
inline double acceptance_probability(double c_ori, double c_new, double temperature) {
  if (c_new < c_ori) return 1.0;
  return std::exp((c_ori - c_new) / c_ori / temperature);
}

/// Tensors of a lifetime whose residual rank sits exactly at the target.
inline std::vector<int> find_critical_tensors(const ContractionTree& tree,
                                              const std::vector<int>& lifetime_tensors,
                                              int target, const IndexSet& sliced) {
  std::vector<int> out;
  for (int t : lifetime_tensors)
    if (residual_rank(tree, t, sliced) == target) out.push_back(t);
  return out;
}

/// Unsliced indices shared by every critical tensor, minus `chosen`.
inline IndexSet find_candidate_indices(const ContractionTree& tree,
                                       const std::vector<int>& critical, const IndexSet& sliced,
                                       EdgeId chosen) {
  if (critical.empty()) return {};
  IndexSet cand = tree.indices(critical.front());
  for (int t : critical) cand = sets::intersection(cand, tree.indices(t));
  cand = sets::difference(cand, sliced);
  std::erase(cand, chosen);
  std::erase_if(cand, [&](EdgeId e) { return tree.network().weight(e) != 1; });
  return cand;
}

/// Incrementally maintained total sliced cost and residual ranks for
/// fixed-size replacement moves.
class SlicedCostTracker {
 public:
  SlicedCostTracker(const ContractionTree& tree, const std::map<EdgeId, Lifetime>& lifetimes,
                    IndexSet sliced)
      : tree_(&tree), lifetimes_(&lifetimes), sliced_(std::move(sliced)) {
    require_unit_sliced(tree, sliced_);
    const int s = static_cast<int>(sliced_.size());
    for (const auto& n : tree.nodes()) {
      const auto u = tree.node_indices(n);
      exponent_.push_back(tree.network().rank(u) + s - sets::intersection_size(u, sliced_));
    }
    for (int t = 0; t < tree.num_tree_edges(); ++t)
      residual_.push_back(residual_rank(tree, t, sliced_));
  }

  const IndexSet& sliced() const { return sliced_; }

  BigCount total() const {
    BigCount c;
    for (int e : exponent_) c.add_pow2(static_cast<unsigned>(e));
    return c;
  }

  int residual(int tree_edge) const { return residual_[tree_edge]; }

  /// Cost after replacing `out` by `in` (out ∈ S, in ∉ S).
  BigCount total_after_swap(EdgeId out, EdgeId in) const {
    auto delta = node_delta(out, in);
    BigCount c;
    for (std::size_t k = 0; k < exponent_.size(); ++k)
      c.add_pow2(static_cast<unsigned>(exponent_[k] + delta[k]));
    return c;
  }

  /// False when the swap pushes a tensor above `target`. Tensors the swap
  /// leaves alone are not checked.
  bool swap_meets_target(EdgeId out, EdgeId in, int target) const {
    const auto& gain = lifetimes_->at(out).tree_edges;
    const auto& loss = lifetimes_->at(in).tree_edges;
    for (int t : gain) {
      if (std::find(loss.begin(), loss.end(), t) != loss.end()) continue;
      if (residual_[t] + 1 > target) return false;
    }
    return true;
  }

  void apply_swap(EdgeId out, EdgeId in) {
    auto delta = node_delta(out, in);
    for (std::size_t k = 0; k < exponent_.size(); ++k) exponent_[k] += delta[k];
    for (int t : lifetimes_->at(out).tree_edges) ++residual_[t];
    for (int t : lifetimes_->at(in).tree_edges) --residual_[t];
    std::erase(sliced_, out);
    sliced_.insert(std::upper_bound(sliced_.begin(), sliced_.end(), in), in);
  }

 private:
  std::vector<int> node_delta(EdgeId out, EdgeId in) const {
    std::vector<int> delta(exponent_.size(), 0);
    const int n = tree_->num_leaves();
    for (int node : lifetimes_->at(out).nodes) delta[node - n] += 1;
    for (int node : lifetimes_->at(in).nodes) delta[node - n] -= 1;
    return delta;
  }

  const ContractionTree* tree_;
  const std::map<EdgeId, Lifetime>* lifetimes_;
  IndexSet sliced_;
  std::vector<int> exponent_;
  std::vector<int> residual_;
};

/// Drops sliced indices whose lifetime holds no critical tensor, one at a
/// time in id order; the result still meets the target.
inline IndexSet remove_redundant(const ContractionTree& tree,
                                 const std::map<EdgeId, Lifetime>& lifetimes, IndexSet sliced,
                                 int target) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (EdgeId e : sliced) {
      if (find_critical_tensors(tree, lifetimes.at(e).tree_edges, target, sliced).empty()) {
        std::erase(sliced, e);
        changed = true;
        break;
      }
    }
  }
  return sliced;
}

struct RefineStats {
  int outer_iterations = 0;
  int evaluations = 0;
  int accepted = 0;
  int uphill_accepted = 0;
  int best_found_at = 0;  // outer iteration where the returned set was first seen
};

struct RefineResult {
  SliceSet slices;
  BigCount cost;
  double overhead = 1.0;
  RefineStats stats;
};

/// Simulated-annealing slice refiner.
///
/// Each outer iteration picks a sliced index at random, collects the critical
/// tensors on its lifetime and walks the unsliced indices shared by all of
/// them in id order, replacing the current occupant of the slot whenever the
/// move is accepted. Improving moves are always accepted, others with
/// probability exp((C_ori - C_new) / C_ori / T). Moves that would break the
/// memory target are rejected outright. T is multiplied by alpha after every
/// outer iteration until it drops below t_final. The best state seen is
/// returned, after a final redundancy sweep.
inline RefineResult refine(const ContractionTree& tree,
                           const std::map<EdgeId, Lifetime>& lifetimes, const SliceSet& initial,
                           int target, const AnnealConfig& cfg) {
  cfg.validate();
  require_unit_sliced(tree, initial.indices);
  if (!meets_target(tree, initial.indices, target))
    throw ValidationError("refine: initial slicing set does not meet target rank " +
                          std::to_string(target));
  const BigCount base = tree_cost(tree).time_total;

  SlicedCostTracker state(tree, lifetimes,
                          remove_redundant(tree, lifetimes, initial.indices, target));
  RandomStream choose(cfg.seed, RandomStream::kIndexChoice);
  RandomStream accept(cfg.seed, RandomStream::kAcceptance);

  RefineResult res;
  BigCount current = state.total();
  IndexSet best = state.sliced();
  BigCount best_cost = current;

  double temperature = cfg.t_initial;
  while (!state.sliced().empty() && temperature >= cfg.t_final &&
         res.stats.outer_iterations < cfg.max_outer_iters) {
    ++res.stats.outer_iterations;
    const auto& s = state.sliced();
    const EdgeId chosen = s[choose.below(s.size())];
    const auto critical =
        find_critical_tensors(tree, lifetimes.at(chosen).tree_edges, target, s);
    const auto candidates = find_candidate_indices(tree, critical, s, chosen);
    EdgeId slot = chosen;
    for (EdgeId can : candidates) {
      if (sets::contains(state.sliced(), can)) continue;
      if (!state.swap_meets_target(slot, can, target)) continue;
      ++res.stats.evaluations;
      const BigCount next = state.total_after_swap(slot, can);
      bool take = next < current;
      if (!take) {
        const double p = acceptance_probability(current.to_double(), next.to_double(), temperature);
        take = accept.uniform() < p;
        if (take && next > current) ++res.stats.uphill_accepted;
      }
      if (!take) continue;
      state.apply_swap(slot, can);
      slot = can;
      current = next;
      ++res.stats.accepted;
      if (current < best_cost) {
        best_cost = current;
        best = state.sliced();
        res.stats.best_found_at = res.stats.outer_iterations;
      }
    }
    temperature *= cfg.alpha;
  }

  best = remove_redundant(tree, lifetimes, best, target);
  res.slices = SliceSet{best, target, Provenance::kRefiner};
  res.cost = sliced_cost(tree, best).time_total;
  res.overhead = base.is_zero() ? 1.0 : ratio(res.cost, base);
  return res;
}

inline RefineResult refine(const ContractionTree& tree, const SliceSet& initial, int target,
                           const AnnealConfig& cfg) {
  return refine(tree, all_lifetimes(tree), initial, target, cfg);
}

/// Independent chains with seeds cfg.seed, cfg.seed + 1, ...; the cheapest
/// result wins, ties going to the lexicographically smaller index set. The
/// outcome does not depend on `workers`.
inline RefineResult refine_chains(const ContractionTree& tree, const SliceSet& initial,
                                  int target, const AnnealConfig& cfg, int chains,
                                  int workers = 1) {
  if (chains < 1) throw ValidationError("refine: --chains must be >= 1");
  workers = std::clamp(workers, 1, chains);
  const auto lifetimes = all_lifetimes(tree);
  std::vector<RefineResult> results(chains);
  auto run = [&](int first) {
    for (int c = first; c < chains; c += workers) {
      AnnealConfig chain_cfg = cfg;
      chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(c);
      results[c] = refine(tree, lifetimes, initial, target, chain_cfg);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < results.size(); ++c) {
    const auto& a = results[c];
    const auto& b = results[best];
    if (a.cost < b.cost || (a.cost == b.cost && a.slices.indices < b.slices.indices)) best = c;
  }
  return results[best];
}

}  // namespace tnslicer

#endif  // TNSLICER_REFINE_HPP_
