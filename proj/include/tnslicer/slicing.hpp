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

#ifndef TNSLICER_SLICING_HPP_
#define TNSLICER_SLICING_HPP_

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "tnslicer/cost.hpp"
#include "tnslicer/lifetime.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

enum class FinderPool {
  kLocal,   // candidates are the indices of the chosen end tensor
  kGlobal,  // candidates are all indices on the live stem
};

struct FinderOptions {
  FinderPool pool = FinderPool::kLocal;
};

namespace detail {

/// Live portion of the stem while the finder runs.
struct FinderState {
  const ContractionTree* tree = nullptr;
  const Stem* stem = nullptr;
  std::vector<int> live;      // stem positions still above target
  std::vector<int> residual;  // per stem position
  IndexSet sliced;
  int target = 0;

  int residual_at(int pos) const { return residual[pos]; }

  bool holds(int pos, EdgeId e) const {
    return sets::contains(tree->indices(stem->tensors[pos]), e);
  }

  void add(EdgeId e) {
    sliced.insert(std::upper_bound(sliced.begin(), sliced.end(), e), e);
    for (int p = 0; p < stem->length(); ++p)
      if (holds(p, e)) --residual[p];
  }

  void drop_satisfied() {
    std::erase_if(live, [&](int p) { return residual[p] <= target; });
  }
};

}  // namespace detail

/// Lifetime-guided slice finder on one stem.
///
/// Repeatedly takes the live end tensor with the smaller residual rank (the
/// far end on ties), slices as many of its indices as it exceeds the target
/// by, choosing the ones alive on the most live stem tensors, then drops every
/// tensor that now fits. `initial` seeds the slicing set, which lets the same
/// routine continue on branch stems.
inline SliceSet find_slices(const ContractionTree& tree, const Stem& stem,
                            const StemIntervals& intervals, int target,
                            const FinderOptions& options = {}, const IndexSet& initial = {}) {
  if (target < 1) throw ValidationError("find_slices: target rank must be >= 1");
  if (stem.length() == 0) throw ValidationError("find_slices: empty stem");
  require_unit_sliced(tree, initial);
  const auto& net = tree.network();

  detail::FinderState st;
  st.tree = &tree;
  st.stem = &stem;
  st.target = target;
  st.sliced = initial;
  for (int p = 0; p < stem.length(); ++p) {
    st.residual.push_back(residual_rank(tree, stem.tensors[p], initial));
    st.live.push_back(p);
  }
  st.drop_satisfied();

  while (!st.live.empty()) {
    const int front = st.live.front();
    const int back = st.live.back();
    const int chosen = st.residual_at(front) < st.residual_at(back) ? front : back;
    const int need = st.residual_at(chosen) - target;

    int max_res = 0;
    for (int p : st.live) max_res = std::max(max_res, st.residual_at(p));

    // Ranked by live length, live tensors at the max residual, full stem
    // interval length (all descending), then id.
    std::vector<std::tuple<int, int, int, EdgeId>> pool;
    for (const auto& [e, iv] : intervals) {
      if (sets::contains(st.sliced, e) || net.weight(e) != 1) continue;
      if (options.pool == FinderPool::kLocal && !st.holds(chosen, e)) continue;
      int live_len = 0, at_max = 0;
      for (int p : st.live)
        if (p >= iv.first && p <= iv.last) {
          ++live_len;
          if (st.residual_at(p) == max_res) ++at_max;
        }
      if (live_len == 0) continue;
      pool.emplace_back(live_len, at_max, iv.length(), e);
    }
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
      if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
      return std::get<3>(a) < std::get<3>(b);
    });
    if (static_cast<int>(pool.size()) < need)
      throw InfeasibleError("find_slices: index pool exhausted at stem position " +
                            std::to_string(chosen) + " (needs " + std::to_string(need) +
                            " more sliceable indices, has " + std::to_string(pool.size()) + ")");
    for (int k = 0; k < need; ++k) st.add(std::get<3>(pool[k]));
    st.drop_satisfied();
  }
  return SliceSet{st.sliced, target, Provenance::kFinder};
}

/// Runs the finder on the main stem, then on the stem of every branch subtree
/// that still holds a tensor above the target, until the whole tree fits.
inline SliceSet slice_tree(const ContractionTree& tree, int target,
                           const FinderOptions& options = {}) {
  if (target < 1) throw ValidationError("slice_tree: target rank must be >= 1");
  IndexSet sliced;
  auto violates = [&](int subtree_root) {
    for (int t : tree.subtree(subtree_root))
      if (residual_rank(tree, t, sliced) > target) return true;
    return false;
  };
  std::vector<int> work{tree.root()};
  while (!work.empty()) {
    const int r = work.back();
    work.pop_back();
    if (!violates(r)) continue;
    Stem stem = tree.is_leaf(r) ? Stem{{r}, {}, {}, {}} : extract_stem(tree, r);
    const auto intervals = restrict_lifetimes(tree, stem);
    sliced = find_slices(tree, stem, intervals, target, options, sliced).indices;
    for (auto it = stem.branches.rbegin(); it != stem.branches.rend(); ++it) work.push_back(*it);
  }
  return SliceSet{sliced, target, Provenance::kFinder};
}

}  // namespace tnslicer

#endif  // TNSLICER_SLICING_HPP_
