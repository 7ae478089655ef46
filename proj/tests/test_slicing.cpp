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


#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tnslicer.hpp"

using namespace tnslicer;

namespace {

struct StemView {
  ContractionTree tree;
  Stem stem;
  StemIntervals intervals;
};

StemView view(const fixtures::Instance& inst) {
  StemView v{inst.tree(), {}, {}};
  v.stem = extract_stem(v.tree);
  v.intervals = restrict_lifetimes(v.tree, v.stem);
  return v;
}

bool stem_fits(const StemView& v, const IndexSet& s, int t) {
  for (int te : v.stem.tensors)
    if (residual_rank(v.tree, te, s) > t) return false;
  return true;
}

TEST(Finder, NothingToDoBelowTarget) {
  const auto v = view(fixtures::five_part_chain());
  EXPECT_TRUE(find_slices(v.tree, v.stem, v.intervals, 4).indices.empty());
}

TEST(Finder, FivePartChainNeedsOneIndex) {
  const auto inst = fixtures::five_part_chain();
  const auto v = view(inst);
  const auto s = find_slices(v.tree, v.stem, v.intervals, 3);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE(stem_fits(v, s.indices, 3));
  EXPECT_EQ(s.provenance, Provenance::kFinder);
}

TEST(Finder, SingleOversizedTensorTakesItsTwoLongestIndices) {
  // Position 2 has rank 5 at target 3; its indices live for 5, 4, 2 and 1 positions.
  auto cat = caterpillar(6, {{"z_long", 0, 4}, {"y_mid", 1, 4}, {"a_short", 2, 3},
                             {"b_tiny", 2, 2}, {"c_pad", 2, 2}, {"tail", 5, 5}});
  const auto v = view({cat.network, cat.path});
  ASSERT_EQ(v.tree.rank(v.stem.tensors[2]), 5);
  const auto s = find_slices(v.tree, v.stem, v.intervals, 3);
  EXPECT_EQ(s.indices, cat.network.ids({"z_long", "y_mid"}));
}

TEST(Finder, PlateauCrossedByOneIndex) {
  const auto inst = fixtures::plateau_stem();
  const auto v = view(inst);
  for (int p = 0; p < v.stem.length(); ++p)
    EXPECT_EQ(v.tree.rank(v.stem.tensors[p]) > 3, p >= 2 && p <= 6) << p;
  const auto s = find_slices(v.tree, v.stem, v.intervals, 3);
  EXPECT_EQ(s.indices, inst.net.ids({"X"}));
  const auto g = greedy_slicer(v.tree, 3);
  // greedy also has to fix the branches feeding the plateau
  EXPECT_GT(g.size(), s.size());
  EXPECT_TRUE(sets::contains(g.indices, inst.net.at("Y")));
  EXPECT_TRUE(meets_target(v.tree, g.indices, 3));
}

TEST(Finder, ValidOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto inst = fixtures::random_instance(seed, 10 + static_cast<int>(seed % 8), 12, 2);
    const auto v = view(inst);
    const int peak = tree_cost(v.tree).log2_memory_peak;
    for (int t = std::max(1, peak - 3); t <= peak; ++t) {
      for (auto pool : {FinderPool::kLocal, FinderPool::kGlobal}) {
        const auto s = find_slices(v.tree, v.stem, v.intervals, t, {pool});
        EXPECT_TRUE(stem_fits(v, s.indices, t)) << "seed " << seed << " t " << t;
        const auto full = slice_tree(v.tree, t, {pool});
        EXPECT_TRUE(meets_target(v.tree, full.indices, t)) << "seed " << seed << " t " << t;
        EXPECT_EQ(find_slices(v.tree, v.stem, v.intervals, t, {pool}).indices, s.indices);
      }
    }
  }
}

TEST(Finder, Errors) {
  const auto v = view(fixtures::five_part_chain());
  EXPECT_THROW(find_slices(v.tree, v.stem, v.intervals, 0), ValidationError);
  // a has extent 8 and cannot be sliced, so [a,b] never gets below rank 3.
  auto heavy = parse_network(R"({"edges":[{"id":"a","log2_weight":3},{"id":"b"}],
      "vertices":[{"id":0,"indices":["a","b"]},{"id":1,"indices":["a"]}]})");
  const auto tree = build_tree(heavy, ContractionPath{{{0, 1}}});
  const auto stem = extract_stem(tree);
  EXPECT_THROW(find_slices(tree, stem, restrict_lifetimes(tree, stem), 1), InfeasibleError);
}

}  // namespace
