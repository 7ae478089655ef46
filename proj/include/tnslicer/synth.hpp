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

// Synthetic networks and a throwaway path generator. None of this searches for
// good contraction orders; it only produces valid fixtures.

#ifndef TNSLICER_SYNTH_HPP_
#define TNSLICER_SYNTH_HPP_

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tnslicer/network.hpp"
#include "tnslicer/rng.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

inline std::string edge_label(int i) {
  std::string s = std::to_string(i);
  return "e" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

/// Random connected network: a random spanning tree plus `extra_edges` chords
/// (no two indices between the same pair of vertices) and `open_edges`
/// dangling legs. Every edge has unit weight.
inline TensorNetwork random_network(int vertices, int extra_edges, int open_edges,
                                    std::uint64_t seed) {
  if (vertices < 1) throw ValidationError("random_network: need at least one vertex");
  RandomStream rng(seed, RandomStream::kNetwork);
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> order(vertices);
  for (int i = 0; i < vertices; ++i) order[i] = i;
  rng.shuffle(order.begin(), order.end());
  for (int i = 1; i < vertices; ++i) {
    const int parent = order[rng.below(static_cast<std::uint64_t>(i))];
    pairs.emplace_back(std::min(parent, order[i]), std::max(parent, order[i]));
  }
  const int max_pairs = vertices * (vertices - 1) / 2;
  int budget = std::min(extra_edges, max_pairs - static_cast<int>(pairs.size()));
  for (int tries = 0; budget > 0 && tries < 100 * (extra_edges + 1); ++tries) {
    int a = static_cast<int>(rng.below(vertices));
    int b = static_cast<int>(rng.below(vertices));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) != pairs.end()) continue;
    pairs.emplace_back(a, b);
    --budget;
  }
  std::vector<EdgeSpec> edges;
  std::vector<VertexSpec> vs(vertices);
  for (int i = 0; i < vertices; ++i) vs[i].id = i;
  int next = 0;
  for (auto [a, b] : pairs) {
    const auto label = edge_label(next++);
    edges.push_back({label, 1});
    vs[a].indices.push_back(label);
    vs[b].indices.push_back(label);
  }
  for (int k = 0; k < open_edges; ++k) {
    const auto label = edge_label(next++);
    edges.push_back({label, 1});
    vs[rng.below(vertices)].indices.push_back(label);
  }
  return TensorNetwork::create(std::move(edges), std::move(vs));
}

/// rows x cols lattice with unit-weight bonds and, optionally, one open leg
/// per site in the first column.
inline TensorNetwork grid_network(int rows, int cols, bool open_first_column = false) {
  std::vector<EdgeSpec> edges;
  std::vector<VertexSpec> vs(rows * cols);
  auto site = [cols](int r, int c) { return r * cols + c; };
  for (int i = 0; i < rows * cols; ++i) vs[i].id = i;
  int next = 0;
  auto link = [&](int a, int b) {
    const auto label = edge_label(next++);
    edges.push_back({label, 1});
    vs[a].indices.push_back(label);
    if (b >= 0) vs[b].indices.push_back(label);
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) link(site(r, c), site(r, c + 1));
      if (r + 1 < rows) link(site(r, c), site(r + 1, c));
      if (open_first_column && c == 0) link(site(r, c), -1);
    }
  return TensorNetwork::create(std::move(edges), std::move(vs));
}

/// One index living on stem positions [first, last] of a caterpillar.
struct IntervalSpec {
  std::string label;
  int first = 0;
  int last = 0;
};

struct Caterpillar {
  TensorNetwork network;
  ContractionPath path;
};

/// Builds a caterpillar network whose stem tensor at position i (0..len-1)
/// holds exactly the indices whose interval contains i. Vertex 0 is the stem's
/// starting leaf; vertex i >= 1 is the branch absorbed at step i, carrying the
/// indices that start at i or end at i-1. Intervals reaching len-1 are open.
inline Caterpillar caterpillar(int len, const std::vector<IntervalSpec>& intervals) {
  if (len < 2) throw ValidationError("caterpillar: need at least two stem positions");
  std::vector<EdgeSpec> edges;
  std::vector<VertexSpec> vs(len);
  for (int i = 0; i < len; ++i) vs[i].id = i;
  for (const auto& iv : intervals) {
    if (iv.first < 0 || iv.last >= len || iv.first > iv.last)
      throw ValidationError("caterpillar: bad interval for '" + iv.label + "'");
    edges.push_back({iv.label, 1});
    vs[iv.first].indices.push_back(iv.label);
    if (iv.last + 1 < len) vs[iv.last + 1].indices.push_back(iv.label);
  }
  Caterpillar out{TensorNetwork::create(std::move(edges), std::move(vs)), {}};
  out.path.steps.emplace_back(0, 1);
  for (int i = 2; i < len; ++i) out.path.steps.emplace_back(len + i - 2, i);
  return out;
}

/// Valid but unoptimized path: repeatedly contracts a pair of live tensors
/// that share an index, preferring pairs whose output is small relative to
/// the inputs, with seeded random tie-breaking noise.
inline ContractionPath greedy_test_path(const TensorNetwork& net, std::uint64_t seed) {
  if (!net.connected()) throw ValidationError("greedy_test_path: network is disconnected");
  RandomStream rng(seed, RandomStream::kPath);
  const int n = static_cast<int>(net.num_vertices());
  std::vector<int> live_ids;
  std::vector<IndexSet> live_sets;
  for (const auto& v : net.vertices()) {
    live_ids.push_back(v.id);
    live_sets.push_back(v.indices);
  }
  ContractionPath path;
  int next_id = n;
  while (live_ids.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < live_ids.size(); ++i)
      for (std::size_t j = i + 1; j < live_ids.size(); ++j) {
        const int shared = sets::intersection_size(live_sets[i], live_sets[j]);
        if (shared == 0) continue;
        const auto out = sets::symmetric_difference(live_sets[i], live_sets[j]);
        const double score = net.rank(out) -
                             std::max(net.rank(live_sets[i]), net.rank(live_sets[j])) +
                             rng.uniform(0.0, 1.5);
        if (score < best) {
          best = score;
          bi = i;
          bj = j;
        }
      }
    path.steps.emplace_back(live_ids[bi], live_ids[bj]);
    auto merged = sets::symmetric_difference(live_sets[bi], live_sets[bj]);
    live_ids.erase(live_ids.begin() + static_cast<long>(bj));
    live_sets.erase(live_sets.begin() + static_cast<long>(bj));
    live_ids.erase(live_ids.begin() + static_cast<long>(bi));
    live_sets.erase(live_sets.begin() + static_cast<long>(bi));
    live_ids.push_back(next_id++);
    live_sets.push_back(std::move(merged));
  }
  return path;
}

/// Network, path and memory target for slicer comparisons.
struct SlicingInstance {
  TensorNetwork network;
  ContractionPath path;
  int target = 1;
};

/// Random network of min_vertices..max_vertices tensors with a throwaway
/// path; the target sits 1 to 3 ranks below the tree's peak (never below 1).
inline SlicingInstance slicing_instance(std::uint64_t seed, int min_vertices, int max_vertices) {
  if (min_vertices < 2 || max_vertices < min_vertices)
    throw ValidationError("slicing_instance: bad vertex range");
  RandomStream rng(seed, RandomStream::kGeneric);
  const int v = rng.range(min_vertices, max_vertices);
  const int extra = rng.range(v / 2, v);
  const int open = rng.range(0, 3);
  auto net = random_network(v, extra, open, seed);
  auto path = greedy_test_path(net, seed);
  const auto tree = build_tree(net, path);
  int peak = 0;
  for (int t = 0; t < tree.num_tree_edges(); ++t) peak = std::max(peak, tree.rank(t));
  const int target = std::max(1, peak - rng.range(1, 3));
  return {std::move(net), std::move(path), target};
}

}  // namespace tnslicer

#endif  // TNSLICER_SYNTH_HPP_
