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

#ifndef TNSLICER_LIFETIME_HPP_
#define TNSLICER_LIFETIME_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "tnslicer/big_count.hpp"
#include "tnslicer/cost.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

enum class EndKind { kLeaf, kRoot };

/// The tree edges (tensors) whose index set contains `index`, ordered along
/// the path they form from `ends[0]` to `ends[1]`.
struct Lifetime {
  EdgeId index = 0;
  std::vector<int> tree_edges;
  std::array<EndKind, 2> ends{EndKind::kLeaf, EndKind::kLeaf};
  /// Internal nodes touching the lifetime (its correlated contractions),
  /// identified by the tree edge they produce, ascending.
  std::vector<int> nodes;

  std::size_t size() const { return tree_edges.size(); }
};

/// Computes the lifetime of one index and checks that it is a simple path:
/// closed indices run leaf to leaf, open indices leaf to root.
inline Lifetime lifetime_of(const ContractionTree& tree, EdgeId index) {
  const auto& net = tree.network();
  if (index >= net.num_edges()) throw ValidationError("lifetime_of: unknown index");
  const std::string name = "'" + net.label(index) + "'";
  Lifetime lf;
  lf.index = index;

  std::vector<int> members;
  for (int t = 0; t < tree.num_tree_edges(); ++t)
    if (sets::contains(tree.indices(t), index)) members.push_back(t);
  if (members.empty()) throw InvariantError("index " + name + " appears in no tensor");

  // Graph nodes: leaf v -> v, internal node producing t -> t, root pseudo-node -> -1.
  auto lower = [&](int t) { return t; };
  auto upper = [&](int t) { return tree.parent(t) < 0 ? -1 : tree.parent(t); };
  std::map<int, std::vector<int>> incident;
  for (int t : members) {
    incident[lower(t)].push_back(t);
    incident[upper(t)].push_back(t);
  }
  std::vector<int> path_ends;
  for (const auto& [node, edges] : incident) {
    if (edges.size() > 2)
      throw InvariantError("lifetime of " + name + " branches at node " + std::to_string(node));
    if (edges.size() == 1) path_ends.push_back(node);
  }
  if (path_ends.size() != 2 || incident.size() != members.size() + 1)
    throw InvariantError("lifetime of " + name + " is not a simple path");

  auto kind = [&](int node) -> EndKind {
    if (node == -1) return EndKind::kRoot;
    if (tree.is_leaf(node)) return EndKind::kLeaf;
    throw InvariantError("lifetime of " + name + " ends inside the tree at node " +
                         std::to_string(node));
  };
  // Walk from a leaf end; with two leaf ends start at the smaller id.
  const int start = path_ends[0] == -1 ? path_ends[1]
                    : path_ends[1] == -1 ? path_ends[0]
                                         : std::min(path_ends[0], path_ends[1]);
  const int finish = start == path_ends[0] ? path_ends[1] : path_ends[0];
  lf.ends = {kind(start), kind(finish)};

  int at = start;
  int prev_edge = -1;
  while (lf.tree_edges.size() < members.size()) {
    const auto& es = incident[at];
    const int e = es[0] != prev_edge ? es[0] : es[1];
    lf.tree_edges.push_back(e);
    at = lower(e) == at ? upper(e) : lower(e);
    prev_edge = e;
  }
  if (at != finish) throw InvariantError("lifetime of " + name + " is disconnected");

  const bool open = net.edge(index).open();
  if (open && !(lf.ends[0] == EndKind::kLeaf && lf.ends[1] == EndKind::kRoot))
    throw InvariantError("open index " + name + " does not run from a leaf to the root");
  if (!open && !(lf.ends[0] == EndKind::kLeaf && lf.ends[1] == EndKind::kLeaf))
    throw InvariantError("closed index " + name + " does not run between two leaves");

  for (const auto& [node, edges] : incident)
    if (node >= 0 && !tree.is_leaf(node)) lf.nodes.push_back(node);
  return lf;
}

inline std::map<EdgeId, Lifetime> all_lifetimes(const ContractionTree& tree) {
  std::map<EdgeId, Lifetime> out;
  for (EdgeId e = 0; e < tree.network().num_edges(); ++e) out.emplace(e, lifetime_of(tree, e));
  return out;
}

/// Heaviest leaf-to-root path. `tensors[0]` is the starting leaf and
/// `tensors.back()` the root edge; step k contracts tensors[k] with
/// branches[k] into tensors[k + 1] at log2 cost node_costs[k].
struct Stem {
  std::vector<int> tensors;
  std::vector<int> node_costs;
  std::vector<int> branches;
  BigCount total_cost;

  int length() const { return static_cast<int>(tensors.size()); }
  int steps() const { return static_cast<int>(branches.size()); }
};

/// Exact bottom-up DP over Σ 2^node_cost; at each junction the child with the
/// heavier best path wins, ties going to the smaller tree-edge id.
inline Stem extract_stem(const ContractionTree& tree, int subtree_root = -1) {
  if (subtree_root < 0) subtree_root = tree.root();
  if (tree.is_leaf(subtree_root)) {
    if (subtree_root == tree.root() && tree.nodes().empty())
      throw ValidationError("extract_stem: tree has no internal node");
    Stem s;
    s.tensors.push_back(subtree_root);
    return s;
  }
  std::vector<BigCount> best(tree.num_tree_edges());
  std::vector<int> pick(tree.num_tree_edges(), -1);
  for (const auto& n : tree.nodes()) {  // SSA order is bottom-up
    const bool take_left = best[n.left] != best[n.right]
                               ? best[n.left] > best[n.right]
                               : n.left < n.right;
    pick[n.out] = take_left ? n.left : n.right;
    best[n.out] = best[pick[n.out]];
    best[n.out].add_pow2(static_cast<unsigned>(node_cost(tree, n)));
  }
  Stem s;
  s.total_cost = best[subtree_root];
  std::vector<int> down{subtree_root};
  while (!tree.is_leaf(down.back())) down.push_back(pick[down.back()]);
  s.tensors.assign(down.rbegin(), down.rend());
  for (std::size_t k = 0; k + 1 < s.tensors.size(); ++k) {
    const auto& n = tree.producer(s.tensors[k + 1]);
    s.branches.push_back(n.left == s.tensors[k] ? n.right : n.left);
    s.node_costs.push_back(node_cost(tree, n));
  }
  return s;
}

/// Closed range of stem positions.
struct Interval {
  int first = 0;
  int last = 0;
  int length() const { return last - first + 1; }
  bool operator==(const Interval&) const = default;
};

/// Index -> stem positions holding it.
using StemIntervals = std::map<EdgeId, Interval>;

/// Stem positions holding each index; indices absent from the stem are
/// dropped. Throws if an index's positions are not contiguous.
inline StemIntervals restrict_lifetimes(const ContractionTree& tree,
                                                     const Stem& stem) {
  StemIntervals out;
  std::map<EdgeId, int> count;
  for (int p = 0; p < stem.length(); ++p)
    for (EdgeId e : tree.indices(stem.tensors[p])) {
      auto [it, fresh] = out.try_emplace(e, Interval{p, p});
      if (!fresh) it->second.last = p;
      ++count[e];
    }
  for (const auto& [e, iv] : out)
    if (count[e] != iv.length())
      throw InvariantError("index '" + tree.network().label(e) +
                           "' is not contiguous on the stem");
  return out;
}

/// Same as above but validated against precomputed lifetimes: every stem
/// position in an interval must belong to that index's lifetime.
inline StemIntervals restrict_lifetimes(const ContractionTree& tree,
                                                     const Stem& stem,
                                                     const std::map<EdgeId, Lifetime>& lifetimes) {
  auto out = restrict_lifetimes(tree, stem);
  for (const auto& [e, iv] : out) {
    const auto it = lifetimes.find(e);
    if (it == lifetimes.end()) throw ValidationError("restrict_lifetimes: lifetime map incomplete");
    for (int p = iv.first; p <= iv.last; ++p) {
      const auto& te = it->second.tree_edges;
      if (std::find(te.begin(), te.end(), stem.tensors[p]) == te.end())
        throw InvariantError("stem and lifetimes come from different trees");
    }
  }
  return out;
}

}  // namespace tnslicer

#endif  // TNSLICER_LIFETIME_HPP_
