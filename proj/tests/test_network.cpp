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

#include <set>
#include <string>

#include "fixtures.hpp"
#include "tnslicer.hpp"

using namespace tnslicer;

namespace {

TEST(BigCount, PowersAndSums) {
  BigCount a = BigCount::pow2(70);
  a.add_pow2(3);
  EXPECT_EQ(a.bit_width(), 71u);
  EXPECT_FALSE(a.is_power_of_two());
  EXPECT_TRUE(BigCount::pow2(130).is_power_of_two());
  EXPECT_EQ(BigCount::pow2(130).log2(), 130.0);
  EXPECT_EQ(BigCount(164).to_string(), "164");
  EXPECT_EQ(BigCount::pow2(64).to_string(), "18446744073709551616");
  BigCount b = BigCount::pow2(63);
  b.add_pow2(63);
  EXPECT_EQ(b, BigCount::pow2(64));
  EXPECT_LT(BigCount(5), BigCount::pow2(64));
  EXPECT_EQ(BigCount(3).shifted(65), BigCount::pow2(65) + BigCount::pow2(66));
}

TEST(BigCount, RatioOfExactIntegers) {
  EXPECT_DOUBLE_EQ(ratio(BigCount(200), BigCount(164)), 200.0 / 164.0);
  BigCount big = BigCount::pow2(200);
  EXPECT_DOUBLE_EQ(ratio(big.shifted(1), big), 2.0);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RandomStream a(7, RandomStream::kIndexChoice), b(7, RandomStream::kIndexChoice);
  RandomStream c(7, RandomStream::kAcceptance);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(a.next(), c.next());
  RandomStream d(1, RandomStream::kGeneric);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(d.below(3), 3u);
  }
}

TEST(Network, ParsesAndSortsEdgesByLabel) {
  const auto net = parse_network(R"({"edges":[{"id":"b"},{"id":"a","log2_weight":2}],
                                     "vertices":[{"id":0,"indices":["a","b"]},{"id":1,"indices":["b"]}]})");
  ASSERT_EQ(net.num_edges(), 2u);
  EXPECT_EQ(net.label(0), "a");
  EXPECT_EQ(net.weight(0), 2);
  EXPECT_TRUE(net.edge(0).open());
  EXPECT_FALSE(net.edge(1).open());
  EXPECT_EQ(net.open_edges(), (IndexSet{0}));
  EXPECT_FALSE(net.unit_weights());
  EXPECT_EQ(net.rank(IndexSet{0, 1}), 3);
}

TEST(Network, RoundTripsThroughJson) {
  const auto inst = fixtures::lattice_4x2();
  const auto again = parse_network(serialize_network(inst.net));
  EXPECT_EQ(serialize_network(again), serialize_network(inst.net));
  const auto p = parse_path(serialize_path(inst.path));
  EXPECT_EQ(p.steps, inst.path.steps);
}

TEST(Network, RejectsMalformedInput) {
  EXPECT_THROW(parse_network("{"), ValidationError);
  EXPECT_THROW(parse_network(R"({"edges":[]})"), ValidationError);
  EXPECT_THROW(parse_network(R"({"edges":[],"vertices":[]})"), ValidationError);
  // hyperedge
  EXPECT_THROW(parse_network(R"({"edges":[{"id":"a"}],"vertices":[{"id":0,"indices":["a"]},
      {"id":1,"indices":["a"]},{"id":2,"indices":["a"]}]})"),
               ValidationError);
  // unknown index
  EXPECT_THROW(parse_network(R"({"edges":[{"id":"a"}],"vertices":[{"id":0,"indices":["z"]}]})"),
               ValidationError);
  // zero weight
  EXPECT_THROW(parse_network(R"({"edges":[{"id":"a","log2_weight":0}],"vertices":[{"id":0,"indices":["a"]}]})"),
               ValidationError);
  // dangling edge with no endpoint
  EXPECT_THROW(parse_network(R"({"edges":[{"id":"a"},{"id":"b"}],"vertices":[{"id":0,"indices":["a"]}]})"),
               ValidationError);
  EXPECT_THROW(parse_network(R"({"format":"other","edges":[{"id":"a"}],"vertices":[{"id":0,"indices":["a"]}]})"),
               ValidationError);
  // ids must be 0..n-1
  EXPECT_THROW(parse_network(R"({"edges":[{"id":"a"}],"vertices":[{"id":0,"indices":["a"]},{"id":2,"indices":["a"]}]})"),
               ValidationError);
  EXPECT_THROW(parse_path(R"({"ssa_path":[[0]]})"), ValidationError);
}

TEST(Tree, MatmulTree) {
  const auto net = fixtures::make_net({"i", "j", "k"}, {{"i", "j"}, {"j", "k"}});
  const auto tree = build_tree(net, ContractionPath{{{0, 1}}});
  EXPECT_EQ(tree.num_tree_edges(), 3);
  EXPECT_EQ(tree.root(), 2);
  EXPECT_EQ(tree.indices(2), net.ids({"i", "k"}));
  EXPECT_EQ(tree.contracted(tree.nodes()[0]), net.ids({"j"}));
  EXPECT_EQ(check_conservation(tree), "");
}

TEST(Tree, ClosedChainHasScalarRoot) {
  const auto net = fixtures::make_net({"a", "b", "c", "d"},
                                      {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
  const auto tree = build_tree(net, ContractionPath{{{0, 1}, {2, 3}, {4, 5}}});
  EXPECT_TRUE(tree.indices(tree.root()).empty());
  EXPECT_EQ(tree.rank(tree.root()), 0);
  EXPECT_EQ(tree.parent(tree.root()), -1);
  EXPECT_EQ(tree.path().steps, (std::vector<std::pair<int, int>>{{0, 1}, {2, 3}, {4, 5}}));
}

TEST(Tree, RejectsBadPaths) {
  const auto inst = fixtures::lattice_4x2();
  auto p = inst.path;
  p.steps.pop_back();
  EXPECT_THROW(build_tree(inst.net, p), ValidationError);
  p = inst.path;
  p.steps[1] = {4, 2};  // 4 was consumed by step 0
  EXPECT_THROW(build_tree(inst.net, p), ValidationError);
  p = inst.path;
  p.steps[0] = {4, 4};
  EXPECT_THROW(build_tree(inst.net, p), ValidationError);
  p = inst.path;
  p.steps[0] = {4, 20};
  EXPECT_THROW(build_tree(inst.net, p), ValidationError);
}

TEST(Tree, ConservationHoldsOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = fixtures::random_instance(seed, 6 + static_cast<int>(seed % 10), 6, 2);
    const auto tree = inst.tree();
    EXPECT_EQ(check_conservation(tree), "") << "seed " << seed;
  }
}

TEST(Synth, CaterpillarStemHoldsItsIntervals) {
  const auto inst = fixtures::five_part_chain();
  const auto tree = inst.tree();
  const auto stem = extract_stem(tree);
  ASSERT_EQ(stem.length(), 6);
  const auto& net = inst.net;
  EXPECT_EQ(tree.indices(stem.tensors[2]), net.ids({"a", "c", "d", "f"}));
  EXPECT_EQ(tree.indices(stem.tensors[3]), net.ids({"b", "c", "d", "f"}));
  EXPECT_EQ(tree.indices(stem.tensors[5]), net.ids({"f"}));
}

TEST(Synth, GeneratorsAreSeeded) {
  EXPECT_EQ(serialize_network(random_network(12, 8, 3, 5)),
            serialize_network(random_network(12, 8, 3, 5)));
  EXPECT_NE(serialize_network(random_network(12, 8, 3, 5)),
            serialize_network(random_network(12, 8, 3, 6)));
  const auto g = grid_network(3, 4, true);
  EXPECT_EQ(g.num_vertices(), 12u);
  EXPECT_EQ(g.open_edges().size(), 3u);
  EXPECT_TRUE(g.connected());
}

}  // namespace
