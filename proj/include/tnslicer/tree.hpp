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

#ifndef TNSLICER_TREE_HPP_
#define TNSLICER_TREE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "tnslicer/common.hpp"
#include "tnslicer/network.hpp"

namespace tnslicer {

/// One pairwise contraction. All three fields are tree-edge ids.
struct TreeNode {
  int left = -1;
  int right = -1;
  int out = -1;
};

/// Rooted binary contraction tree.
///
/// Tree edges are the tensors: ids 0..n-1 are the network's leaves, id n+k is
/// the output of internal node k. Leaf read-outs and the final "root
/// contraction" are implicit; `root()` is the tree edge feeding the root.
class ContractionTree {
 public:
  ContractionTree() = default;

  const TensorNetwork& network() const { return net_; }
  int num_leaves() const { return num_leaves_; }
  int num_tree_edges() const { return static_cast<int>(tensors_.size()); }
  int root() const { return root_; }
  bool is_leaf(int tree_edge) const { return tree_edge < num_leaves_; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

  /// Internal node producing `tree_edge` (tree_edge must not be a leaf).
  const TreeNode& producer(int tree_edge) const { return nodes_.at(tree_edge - num_leaves_); }

  /// Tree edge whose producer consumes `tree_edge`, or -1 at the root.
  int parent(int tree_edge) const { return parent_.at(tree_edge); }

  const IndexSet& indices(int tree_edge) const { return tensors_.at(tree_edge); }
  int rank(int tree_edge) const { return net_.rank(tensors_.at(tree_edge)); }

  /// s_left ∪ s_right ∪ s_out for a node.
  IndexSet node_indices(const TreeNode& n) const {
    return sets::set_union(tensors_[n.left], tensors_[n.right]);
  }

  /// Indices contracted at a node: closed indices shared by both inputs.
  IndexSet contracted(const TreeNode& n) const {
    return sets::intersection(tensors_[n.left], tensors_[n.right]);
  }

  /// Tree edges of the subtree hanging from `tree_edge`, including itself.
  std::vector<int> subtree(int tree_edge) const {
    std::vector<int> out;
    std::vector<int> stack{tree_edge};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      out.push_back(t);
      if (!is_leaf(t)) {
        stack.push_back(producer(t).left);
        stack.push_back(producer(t).right);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ContractionPath path() const {
    ContractionPath p;
    for (const auto& n : nodes_) p.steps.emplace_back(n.left, n.right);
    return p;
  }

 private:
  friend ContractionTree build_tree(const TensorNetwork& net, const ContractionPath& path);

  TensorNetwork net_;
  int num_leaves_ = 0;
  std::vector<IndexSet> tensors_;
  std::vector<int> parent_;
  std::vector<TreeNode> nodes_;
  int root_ = -1;
};

/// Builds the tree for an SSA path. Output index sets are left ∪ right minus
/// the indices both inputs share; with hyperedges excluded those are exactly
/// the closed indices contracted at this node.
inline ContractionTree build_tree(const TensorNetwork& net, const ContractionPath& path) {
  const int n = static_cast<int>(net.num_vertices());
  if (static_cast<int>(path.steps.size()) != n - 1)
    throw ValidationError("path has " + std::to_string(path.steps.size()) + " steps; " +
                          std::to_string(n - 1) + " are needed to merge all " +
                          std::to_string(n) + " tensors into one");
  ContractionTree tree;
  tree.net_ = net;
  tree.num_leaves_ = n;
  tree.tensors_.reserve(2 * n - 1);
  for (const auto& v : net.vertices()) tree.tensors_.push_back(v.indices);
  tree.parent_.assign(2 * n - 1, -1);
  std::vector<bool> consumed(2 * n - 1, false);

  for (int k = 0; k < n - 1; ++k) {
    auto [a, b] = path.steps[k];
    const int live = n + k;
    for (int x : {a, b}) {
      if (x < 0 || x >= live)
        throw ValidationError("path step " + std::to_string(k) + " references unknown vertex " +
                              std::to_string(x));
      if (consumed[x])
        throw ValidationError("path step " + std::to_string(k) + " consumes vertex " +
                              std::to_string(x) + " twice");
    }
    if (a == b)
      throw ValidationError("path step " + std::to_string(k) + " contracts vertex " +
                            std::to_string(a) + " with itself");
    consumed[a] = consumed[b] = true;
    const int out = n + k;
    tree.tensors_.push_back(sets::symmetric_difference(tree.tensors_[a], tree.tensors_[b]));
    tree.parent_[a] = out;
    tree.parent_[b] = out;
    tree.nodes_.push_back(TreeNode{a, b, out});
  }
  tree.root_ = 2 * n - 2;
  if (tree.tensors_[tree.root_] != net.open_edges())
    throw InvariantError("root index set differs from the network's open edges");
  return tree;
}

/// Verifies per node per index that the index occurs in one of the allowed
/// patterns {left,out}, {right,out}, {left,right} or not at all. Returns an
/// empty string on success, else a description of the first violation.
inline std::string check_conservation(const ContractionTree& tree) {
  const auto& net = tree.network();
  for (const auto& node : tree.nodes()) {
    const auto& l = tree.indices(node.left);
    const auto& r = tree.indices(node.right);
    const auto& o = tree.indices(node.out);
    for (EdgeId e = 0; e < net.num_edges(); ++e) {
      const bool in_l = sets::contains(l, e);
      const bool in_r = sets::contains(r, e);
      const bool in_o = sets::contains(o, e);
      const int count = in_l + in_r + in_o;
      const bool ok = count == 0 || (count == 2 && (in_o ? (in_l != in_r) : true));
      if (!ok)
        return "index '" + net.label(e) + "' violates conservation at node producing " +
               std::to_string(node.out);
      if (in_l && in_r && net.edge(e).open())
        return "open index '" + net.label(e) + "' contracted at node " + std::to_string(node.out);
    }
  }
  return {};
}

}  // namespace tnslicer

#endif  // TNSLICER_TREE_HPP_
