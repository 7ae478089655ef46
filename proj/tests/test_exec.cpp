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

#include <cstdlib>
#include <filesystem>

#include "fixtures.hpp"
#include "tnslicer.hpp"

using namespace tnslicer;

namespace {

BigCount total(const FlopCounter& f) {
  BigCount s;
  for (const auto& x : f.per_node) s += x;
  return s;
}

TEST(Kernel, IdentityMatmul) {
  const auto net = fixtures::make_net({"i", "j", "k"}, {{"i", "j"}, {"j", "k"}});
  auto eye = zeros_over(net, net.ids({"i", "j"}));
  eye.data = {1, 0, 0, 1};
  auto eye2 = zeros_over(net, net.ids({"j", "k"}));
  eye2.data = {1, 0, 0, 1};
  std::uint64_t m = 0;
  const auto c = contract_pair(eye, eye2, &m);
  EXPECT_EQ(m, 8u);
  EXPECT_EQ(c.data, (std::vector<Scalar>{1, 0, 0, 1}));
  const auto tree = build_tree(net, ContractionPath{{{0, 1}}});
  const auto r = contract_full(tree, {eye, eye2});
  EXPECT_EQ(r.flops.scalar_multiplies, BigCount(8));
  EXPECT_EQ(r.result.data, (std::vector<Scalar>{1, 0, 0, 1}));
}

TEST(Kernel, TtgtMatchesNaiveOnRandomPairs) {
  RandomStream rng(5, RandomStream::kGeneric);
  for (int trial = 0; trial < 100; ++trial) {
    // Random split of up to 8 labels between a, b and both.
    std::vector<std::string> labels;
    std::vector<std::string> la, lb;
    const int n = rng.range(1, 8);
    for (int i = 0; i < n; ++i) {
      labels.push_back(edge_label(i));
      const int where = rng.range(0, 2);
      if (where != 1) la.push_back(labels.back());
      if (where != 0) lb.push_back(labels.back());
    }
    if (la.empty()) la.push_back(labels[0]), lb.erase(std::remove(lb.begin(), lb.end(), labels[0]), lb.end());
    if (lb.empty()) continue;
    rng.shuffle(la.begin(), la.end());
    rng.shuffle(lb.begin(), lb.end());
    std::vector<EdgeSpec> es;
    for (const auto& l : labels) es.push_back({l, rng.range(1, 2)});
    const auto net = TensorNetwork::create(es, {{0, la}, {1, lb}});
    auto a = random_tensor(net, net.ids(la), rng);
    auto b = random_tensor(net, net.ids(lb), rng);
    a = permuted(a, [&] {
      std::vector<EdgeId> o;
      for (const auto& l : la) o.push_back(net.at(l));
      return o;
    }());
    std::uint64_t m1 = 0, m2 = 0;
    const auto x = contract_pair(a, b, &m1);
    const auto y = contract_pair_naive(a, b, &m2);
    EXPECT_EQ(m1, m2);
    EXPECT_EQ(x.order, y.order);
    EXPECT_LT(relative_error(x, y), 1e-12) << trial;
  }
}

TEST(Exec, ClosedFourCycleIsTrace) {
  const auto net = fixtures::make_net({"a", "b", "c", "d"},
                                      {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
  const auto tree = build_tree(net, ContractionPath{{{0, 1}, {2, 3}, {4, 5}}});
  const auto in = random_inputs(net, 3);
  // trace(A B C D) with D stored as [a, d] -> D^T in (d, a) order
  Scalar tr = 0;
  auto at = [](const DenseTensor& t, int r, int c) { return t.data[r * 2 + c]; };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          tr += at(in[0], a, b) * at(in[1], b, c) * at(in[2], c, d) * at(in[3], a, d);
  const auto r = contract_full(tree, in);
  ASSERT_EQ(r.result.data.size(), 1u);
  EXPECT_LT(std::abs(r.result.data[0] - tr), 1e-12);
}

TEST(Exec, MatchesGiantSumOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = fixtures::random_instance(seed, 10, 6, 2);
    if (inst.net.num_edges() > 20) continue;
    const auto tree = inst.tree();
    const auto in = random_inputs(inst.net, seed);
    const auto r = contract_full(tree, in);
    EXPECT_LT(relative_error(r.result, brute_force_contract(inst.net, in)), 1e-10) << seed;
    EXPECT_EQ(r.flops.scalar_multiplies, tree_cost(tree).time_total);
    EXPECT_EQ(total(r.flops), r.flops.scalar_multiplies);
  }
}

TEST(Exec, SlicedSumsAndStacksToFull) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto inst = fixtures::random_instance(seed, 9, 7, 3);
    const auto tree = inst.tree();
    const auto in = random_inputs(inst.net, seed + 100);
    const auto full = contract_full(tree, in);
    RandomStream rng(seed, RandomStream::kGeneric);
    IndexSet s;
    for (EdgeId e = 0; e < inst.net.num_edges(); ++e)
      if (rng.bernoulli(0.35)) s.push_back(e);
    const auto sl = contract_sliced(tree, s, in);
    EXPECT_LT(relative_error(sl.result, full.result), 1e-10) << seed;
    EXPECT_EQ(sl.flops.scalar_multiplies, sliced_cost(tree, s).time_total);
    EXPECT_EQ(ratio(sl.flops.scalar_multiplies, full.flops.scalar_multiplies), overhead(tree, s));
    ExecOptions four;
    four.workers = 4;
    const auto par = contract_sliced(tree, s, in, four);
    EXPECT_EQ(par.result.data, sl.result.data);
  }
}

TEST(Exec, SingleSliceIsSumOfTwoHalves) {
  const auto inst = fixtures::lattice_4x2();
  const auto tree = inst.tree();
  const auto in = random_inputs(inst.net, 1);
  const auto full = contract_full(tree, in);
  const IndexSet e{inst.net.at("e")};
  const auto sl = contract_sliced(tree, e, in);
  EXPECT_LT(relative_error(sl.result, full.result), 1e-12);
  EXPECT_EQ(sl.flops.scalar_multiplies, BigCount(200));
  EXPECT_EQ(full.flops.scalar_multiplies, BigCount(164));
  EXPECT_EQ(contract_sliced(tree, IndexSet{}, in).flops.scalar_multiplies, BigCount(164));
}

TEST(Exec, NaiveKernelAgrees) {
  const auto inst = fixtures::random_instance(4, 10, 8, 2);
  const auto tree = inst.tree();
  const auto in = random_inputs(inst.net, 4);
  ExecOptions naive;
  naive.kernel = Kernel::kNaive;
  const auto a = contract_full(tree, in);
  const auto b = contract_full(tree, in, naive);
  EXPECT_LT(relative_error(a.result, b.result), 1e-12);
  EXPECT_EQ(a.flops.scalar_multiplies, b.flops.scalar_multiplies);
}

TEST(Exec, InputValidation) {
  const auto inst = fixtures::lattice_4x2();
  const auto tree = inst.tree();
  auto in = random_inputs(inst.net, 1);
  in.pop_back();
  EXPECT_THROW(contract_full(tree, in), ValidationError);
  in = random_inputs(inst.net, 1);
  in[0].data.pop_back();
  EXPECT_THROW(contract_full(tree, in), ValidationError);
  in = random_inputs(inst.net, 1);
  std::swap(in[0], in[1]);
  EXPECT_THROW(contract_full(tree, in), ValidationError);
  // Reordered but otherwise correct inputs are fine.
  in = random_inputs(inst.net, 1);
  const auto ref = contract_full(tree, in);
  in[2] = permuted(in[2], {in[2].order[2], in[2].order[0], in[2].order[1]});
  EXPECT_LT(relative_error(contract_full(tree, in).result, ref.result), 1e-12);
}

TEST(Exec, FlopGuard) {
  const auto inst = fixtures::lattice_4x2();
  const auto tree = inst.tree();
  const auto in = random_inputs(inst.net, 1);
  ExecOptions tight;
  tight.max_flops = BigCount(100);
  EXPECT_THROW(contract_full(tree, in, tight), InfeasibleError);
  tight.force = true;
  EXPECT_NO_THROW(contract_full(tree, in, tight));
  ::setenv("TN_SLICER_MAX_FLOPS", "1000", 1);
  EXPECT_EQ(default_flop_limit(), BigCount(1000));
  ::setenv("TN_SLICER_MAX_FLOPS", "abc", 1);
  EXPECT_THROW(default_flop_limit(), ValidationError);
  ::unsetenv("TN_SLICER_MAX_FLOPS");
  EXPECT_EQ(default_flop_limit(), BigCount::pow2(34));
}

TEST(Fused, SpanningStemRunsThirtyTwoSubtasks) {
  const auto inst = fixtures::spanning_stem(6);
  const auto tree = inst.tree();
  const auto stem = extract_stem(tree);
  const auto plan = plan_fusion(tree, stem, restrict_lifetimes(tree, stem), 3);
  const auto in = random_inputs(inst.net, 9);
  const auto fused = execute_fused(tree, stem, plan, in);
  const auto ref = contract_full(tree, in);
  EXPECT_LT(relative_error(fused.result, ref.result), 1e-10);
  ASSERT_EQ(fused.ledger.groups.size(), 1u);
  EXPECT_EQ(fused.ledger.groups[0].subtasks, 32u);
  EXPECT_EQ(fused.ledger.groups[0].max_resident_rank, 3);
  EXPECT_EQ(fused.ledger.per_subtask_group(), 2.0);
  EXPECT_EQ(fused.ledger.baseline_per_stem_pass(), 2 * plan.steps);
  EXPECT_EQ(fused.flops.scalar_multiplies, ref.flops.scalar_multiplies);
}

TEST(Fused, RandomPlansMatchUnfused) {
  int ran = 0;
  for (std::uint64_t seed = 0; seed < 40 && ran < 20; ++seed) {
    const auto inst = fixtures::random_instance(seed, 10, 9, 3);
    const auto tree = inst.tree();
    const auto stem = extract_stem(tree);
    const auto iv = restrict_lifetimes(tree, stem);
    const int peak = tree_cost(tree).log2_memory_peak;
    const IndexSet process = seed % 2 ? slice_tree(tree, std::max(1, peak - 1)).indices : IndexSet{};
    FusedPlan plan;
    try {
      plan = plan_fusion(tree, stem, iv, std::max(2, peak - 2), process);
    } catch (const InfeasibleError&) {
      continue;
    }
    const auto in = random_inputs(inst.net, seed);
    const auto fused = execute_fused(tree, stem, plan, in);
    const auto ref = contract_full(tree, in);
    EXPECT_LT(relative_error(fused.result, ref.result), 1e-10) << seed;
    EXPECT_EQ(fused.ledger.per_subtask_group(), 2.0);
    EXPECT_EQ(fused.flops.scalar_multiplies, sliced_cost(tree, process).time_total);
    ++ran;
  }
  EXPECT_GE(ran, 10);
}

TEST(TensorIo, RoundTrip) {
  const auto inst = fixtures::lattice_4x2();
  const auto in = random_inputs(inst.net, 2);
  const auto dir = std::filesystem::temp_directory_path() / "tnslicer_io_test";
  std::filesystem::create_directories(dir);
  write_tensor_manifest(inst.net, in, dir / "inputs.json");
  const auto back = read_tensor_manifest(inst.net, dir / "inputs.json");
  ASSERT_EQ(back.size(), in.size());
  for (std::size_t v = 0; v < in.size(); ++v) EXPECT_EQ(back[v].data, in[v].data);
  std::filesystem::resize_file(dir / "t0.bin", 8);
  EXPECT_THROW(read_tensor_manifest(inst.net, dir / "inputs.json"), ValidationError);
  std::filesystem::remove_all(dir);
}

}  // namespace
