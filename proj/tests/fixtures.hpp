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


// Hand-built networks shared by the test binaries.

#ifndef TNSLICER_TESTS_FIXTURES_HPP_
#define TNSLICER_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "tnslicer.hpp"

namespace fixtures {

using namespace tnslicer;

struct Instance {
  TensorNetwork net;
  ContractionPath path;
  ContractionTree tree() const { return build_tree(net, path); }
};

inline TensorNetwork make_net(const std::vector<std::string>& labels,
                              const std::vector<std::vector<std::string>>& tensors) {
  std::vector<EdgeSpec> es;
  for (const auto& l : labels) es.push_back({l, 1});
  std::vector<VertexSpec> vs;
  for (std::size_t i = 0; i < tensors.size(); ++i) vs.push_back({static_cast<int>(i), tensors[i]});
  return TensorNetwork::create(es, vs);
}

// Closed 4x2 lattice over indices a..j, contracted column by column from the
// [f,h,i] corner. Node costs 16, 32, 32, 32, 32, 16, 4.
inline Instance lattice_4x2() {
  auto net = make_net({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"},
                      {{"a", "b"},
                       {"b", "c"},
                       {"c", "e", "f"},
                       {"a", "d", "e"},
                       {"f", "h", "i"},
                       {"i", "j"},
                       {"d", "g", "h"},
                       {"g", "j"}});
  ContractionPath p{{{4, 5}, {8, 2}, {9, 1}, {10, 0}, {11, 3}, {12, 6}, {13, 7}}};
  return {net, p};
}

// Five-step caterpillar in which only stem tensors 2 and 3 exceed rank 3,
// each by one. a takes part in contractions 0..2, b in 2..4, c in 1..3.
inline Instance five_part_chain() {
  auto cat = caterpillar(6, {{"a", 0, 2}, {"b", 3, 4}, {"c", 2, 3}, {"d", 1, 3}, {"f", 0, 5}});
  return {cat.network, cat.path};
}

// Caterpillar of `len` stem tensors, each of rank 8: five indices span the
// whole stem and three short ones are alive at every position.
inline Instance spanning_stem(int len) {
  std::vector<IntervalSpec> iv;
  for (int k = 0; k < 5; ++k) iv.push_back({"s" + std::to_string(k), 0, len - 1});
  for (int k = -2; k < len; ++k)
    iv.push_back({"r" + std::to_string(k + 2), std::max(k, 0), std::min(k + 2, len - 1)});
  auto cat = caterpillar(len, iv);
  return {cat.network, cat.path};
}

// Nine-position caterpillar with a rank-4 plateau on positions 2..6 (target
// 3). X covers exactly the plateau; Y covers 0..5 and is cheaper to slice.
inline Instance plateau_stem() {
  auto cat = caterpillar(9, {{"X", 2, 6},
                             {"Y", 0, 5},
                             {"p0", 0, 0},
                             {"p1", 0, 0},
                             {"q0", 1, 1},
                             {"q1", 1, 1},
                             {"u1", 2, 3},
                             {"u2", 2, 2},
                             {"u3", 3, 4},
                             {"u4", 4, 5},
                             {"u5", 5, 6},
                             {"u6", 6, 7},
                             {"u7", 6, 6},
                             {"v", 8, 8}});
  return {cat.network, cat.path};
}

// Nine-position caterpillar, target 6. The finder returns {i0, i10, i11},
// which no single swap or removal improves; the cheapest valid set is
// {i0, i2, i7}.
inline Instance planted_local_minimum() {
  auto cat = caterpillar(9, {{"i0", 0, 5}, {"i1", 3, 6}, {"i2", 1, 5}, {"i3", 4, 5},
                             {"i4", 0, 0}, {"i5", 1, 2}, {"i6", 1, 1}, {"i7", 3, 7},
                             {"i8", 3, 6}, {"i9", 3, 3}, {"i10", 1, 2}, {"i11", 0, 5},
                             {"i12", 1, 2}, {"i13", 1, 3}});
  return {cat.network, cat.path};
}

inline Instance random_instance(std::uint64_t seed, int vertices, int extra, int open) {
  auto net = random_network(vertices, extra, open, seed);
  auto path = greedy_test_path(net, seed);
  return {net, path};
}

}  // namespace fixtures

#endif  // TNSLICER_TESTS_FIXTURES_HPP_
