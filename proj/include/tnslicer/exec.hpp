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

// Dense reference executor. Slow on purpose; every cost claim elsewhere is
// checked against the multiplications counted here.

#ifndef TNSLICER_EXEC_HPP_
#define TNSLICER_EXEC_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tnslicer/big_count.hpp"
#include "tnslicer/cost.hpp"
#include "tnslicer/fusion.hpp"
#include "tnslicer/lifetime.hpp"
#include "tnslicer/tensor.hpp"
#include "tnslicer/tree.hpp"

namespace tnslicer {

struct FlopCounter {
  BigCount scalar_multiplies;
  std::vector<BigCount> per_node;  // by node index

  explicit FlopCounter(std::size_t nodes = 0) : per_node(nodes) {}

  void add(int node, std::uint64_t count) {
    per_node.at(node) += BigCount(count);
    scalar_multiplies += BigCount(count);
  }
  void merge(const FlopCounter& o) {
    for (std::size_t k = 0; k < per_node.size(); ++k) per_node[k] += o.per_node[k];
    scalar_multiplies += o.scalar_multiplies;
  }
};

enum class Kernel { kTtgt, kNaive };

struct ExecOptions {
  int workers = 1;
  bool force = false;
  BigCount max_flops = BigCount::pow2(34);
  Kernel kernel = Kernel::kTtgt;
};

/// 2^34 unless TN_SLICER_MAX_FLOPS holds a positive integer.
inline BigCount default_flop_limit() {
  if (const char* env = std::getenv("TN_SLICER_MAX_FLOPS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return BigCount(static_cast<std::uint64_t>(v));
    throw ValidationError("TN_SLICER_MAX_FLOPS must be a positive integer");
  }
  return BigCount::pow2(34);
}

inline void check_flop_guard(const BigCount& predicted, const ExecOptions& opt) {
  if (!opt.force && opt.max_flops < predicted)
    throw InfeasibleError("execution needs " + predicted.to_string() +
                          " multiplies, above the limit of " + opt.max_flops.to_string() +
                          " (use --force or TN_SLICER_MAX_FLOPS)");
}

/// One random tensor per vertex, in vertex order.
inline std::vector<DenseTensor> random_inputs(const TensorNetwork& net, std::uint64_t seed) {
  RandomStream rng(seed, RandomStream::kTensorData);
  std::vector<DenseTensor> out;
  for (const auto& v : net.vertices()) out.push_back(random_tensor(net, v.indices, rng));
  return out;
}

inline void check_inputs(const TensorNetwork& net, const std::vector<DenseTensor>& inputs) {
  if (inputs.size() != net.num_vertices())
    throw ValidationError("expected " + std::to_string(net.num_vertices()) + " input tensors, got " +
                          std::to_string(inputs.size()));
  for (std::size_t v = 0; v < inputs.size(); ++v) {
    const auto& t = inputs[v];
    t.check();
    auto sorted = t.order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != net.vertices()[v].indices)
      throw ValidationError("input tensor " + std::to_string(v) + " has the wrong index set");
    for (std::size_t p = 0; p < t.order.size(); ++p)
      if (t.log2_extents[p] != net.weight(t.order[p]))
        throw ValidationError("input tensor " + std::to_string(v) + " has the wrong extent for '" +
                              net.label(t.order[p]) + "'");
  }
}

namespace detail {

using Assignment = std::vector<std::pair<EdgeId, std::uint64_t>>;

/// Bit b of `code` is the value of sliced[b] (most significant first).
inline Assignment assignment(const IndexSet& sliced, std::uint64_t code) {
  Assignment a;
  const std::size_t n = sliced.size();
  for (std::size_t b = 0; b < n; ++b) a.emplace_back(sliced[b], code >> (n - 1 - b) & 1);
  return a;
}

inline DenseTensor run_pair(const DenseTensor& a, const DenseTensor& b, Kernel kernel,
                            std::uint64_t* mults) {
  return kernel == Kernel::kTtgt ? contract_pair(a, b, mults) : contract_pair_naive(a, b, mults);
}

/// Evaluates the subtree under `top` from (possibly sliced) leaves.
inline DenseTensor evaluate(const ContractionTree& tree, const std::vector<DenseTensor>& leaves,
                            int top, Kernel kernel, FlopCounter& flops) {
  if (tree.is_leaf(top)) return leaves[top];
  std::map<int, DenseTensor> live;
  const int n = tree.num_leaves();
  for (int te : tree.subtree(top)) {
    if (tree.is_leaf(te)) continue;
    const auto& node = tree.producer(te);
    auto take = [&](int child) {
      if (tree.is_leaf(child)) return leaves[child];
      auto it = live.find(child);
      DenseTensor t = std::move(it->second);
      live.erase(it);
      return t;
    };
    DenseTensor l = take(node.left);
    DenseTensor r = take(node.right);
    std::uint64_t m = 0;
    live[te] = run_pair(l, r, kernel, &m);
    flops.add(te - n, m);
  }
  return std::move(live.at(top));
}

inline std::vector<DenseTensor> slice_leaves(const std::vector<DenseTensor>& inputs,
                                             const Assignment& a) {
  std::vector<DenseTensor> out;
  out.reserve(inputs.size());
  for (const auto& t : inputs) out.push_back(fix_indices(t, a));
  return out;
}

/// Runs fn(k) for k in [0, count) on `workers` threads with a static stride.
template <typename Fn>
void parallel_for(std::uint64_t count, int workers, Fn fn) {
  workers = static_cast<int>(std::min<std::uint64_t>(std::max(workers, 1), std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t k = w; k < count; k += workers) fn(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

struct ExecResult {
  DenseTensor result;  // over the open indices, sorted
  FlopCounter flops;
};

/// Sums over all assignments of the closed sliced indices and stacks the
/// open ones. Subtask results are buffered and folded in ascending order.
inline ExecResult contract_sliced(const ContractionTree& tree, const IndexSet& sliced,
                                  const std::vector<DenseTensor>& inputs,
                                  const ExecOptions& opt = {}) {
  const auto& net = tree.network();
  require_unit_sliced(tree, sliced);
  check_inputs(net, inputs);
  check_flop_guard(sliced_cost(tree, sliced).time_total, opt);
  const std::uint64_t count = std::uint64_t{1} << sliced.size();
  const auto open = net.open_edges();

  std::vector<DenseTensor> parts(count);
  std::vector<FlopCounter> counters(count, FlopCounter(tree.nodes().size()));
  detail::parallel_for(count, opt.workers, [&](std::uint64_t k) {
    const auto a = detail::assignment(sliced, k);
    const auto leaves = detail::slice_leaves(inputs, a);
    DenseTensor r = detail::evaluate(tree, leaves, tree.root(), opt.kernel, counters[k]);
    auto order = r.order;
    std::sort(order.begin(), order.end());
    parts[k] = permuted(r, order);
  });

  ExecResult out{zeros_over(net, open), FlopCounter(tree.nodes().size())};
  for (std::uint64_t k = 0; k < count; ++k) {
    add_into(out.result, parts[k], detail::assignment(sliced, k));
    out.flops.merge(counters[k]);
  }
  return out;
}

inline ExecResult contract_sliced(const ContractionTree& tree, const SliceSet& s,
                                  const std::vector<DenseTensor>& inputs,
                                  const ExecOptions& opt = {}) {
  return contract_sliced(tree, s.indices, inputs, opt);
}

inline ExecResult contract_full(const ContractionTree& tree, const std::vector<DenseTensor>& inputs,
                                const ExecOptions& opt = {}) {
  return contract_sliced(tree, IndexSet{}, inputs, opt);
}

/// Sum over every assignment of the closed indices of the product of all
/// input entries. Exponential in the number of indices.
inline DenseTensor brute_force_contract(const TensorNetwork& net,
                                        const std::vector<DenseTensor>& inputs) {
  check_inputs(net, inputs);
  const int e = static_cast<int>(net.num_edges());
  int bits = 0;
  for (EdgeId i = 0; i < net.num_edges(); ++i) bits += net.weight(i);
  if (bits > 24) throw ValidationError("brute_force_contract: too many index bits");
  auto result = zeros_over(net, net.open_edges());
  const auto rs = detail::row_major_strides(result.log2_extents);
  std::vector<std::vector<std::uint64_t>> strides;
  for (const auto& t : inputs) strides.push_back(detail::row_major_strides(t.log2_extents));
  std::vector<std::uint64_t> value(e, 0);
  for (std::uint64_t it = 0; it < (std::uint64_t{1} << bits); ++it) {
    std::uint64_t rest = it;
    for (int i = e; i-- > 0;) {
      value[i] = rest & ((std::uint64_t{1} << net.weight(i)) - 1);
      rest >>= net.weight(i);
    }
    Scalar prod = 1;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
      std::uint64_t off = 0;
      for (std::size_t p = 0; p < inputs[v].order.size(); ++p)
        off += value[inputs[v].order[p]] * strides[v][p];
      prod *= inputs[v].data[off];
    }
    std::uint64_t dst = 0;
    for (std::size_t p = 0; p < result.order.size(); ++p) dst += value[result.order[p]] * rs[p];
    result.data[dst] += prod;
  }
  return result;
}

struct GroupTransfers {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t subtasks = 0;  // executed, over all process-level subtasks
  int max_resident_rank = 0;
};

struct TransferLedger {
  std::vector<GroupTransfers> groups;
  std::uint64_t process_subtasks = 1;
  int steps = 0;

  /// Loads plus stores per executed group subtask; 2 when every group
  /// subtask moved its tensor exactly once each way.
  double per_subtask_group() const {
    std::uint64_t moves = 0, runs = 0;
    for (const auto& g : groups) {
      moves += g.loads + g.stores;
      runs += g.subtasks;
    }
    return runs ? static_cast<double>(moves) / static_cast<double>(runs) : 0.0;
  }
  int baseline_per_stem_pass() const { return 2 * steps; }
  int fused_per_stem_pass() const { return 2 * static_cast<int>(groups.size()); }
};

struct FusedExecution {
  DenseTensor result;  // root tensor over the open indices, sorted
  FlopCounter flops;
  TransferLedger ledger;
};

/// Runs the stem group by group. Each process-level subtask pre-contracts
/// the branches, then for each group loads every secondary-sliced piece of
/// the current stem tensor, applies the group's steps and stores the piece
/// into the next boundary tensor. The resident rank is checked after every
/// step. Requires a stem that starts at a leaf and ends at the root.
inline FusedExecution execute_fused(const ContractionTree& tree, const Stem& stem,
                                    const FusedPlan& plan, const std::vector<DenseTensor>& inputs,
                                    const ExecOptions& opt = {}) {
  const auto& net = tree.network();
  check_inputs(net, inputs);
  if (stem.tensors.empty() || stem.tensors.back() != tree.root() || !tree.is_leaf(stem.tensors[0]))
    throw ValidationError("execute_fused: stem must run from a leaf to the root");
  if (const auto why = check_fusion_plan(tree, stem, plan); !why.empty())
    throw ValidationError("execute_fused: " + why);
  check_flop_guard(sliced_cost(tree, plan.process_slices).time_total, opt);

  const std::uint64_t count = std::uint64_t{1} << plan.process_slices.size();
  std::vector<DenseTensor> parts(count);
  std::vector<FlopCounter> counters(count, FlopCounter(tree.nodes().size()));
  std::vector<TransferLedger> ledgers(count);
  const int n = tree.num_leaves();

  detail::parallel_for(count, opt.workers, [&](std::uint64_t task) {
    const auto a = detail::assignment(plan.process_slices, task);
    const auto leaves = detail::slice_leaves(inputs, a);
    auto& flops = counters[task];
    auto& ledger = ledgers[task];
    ledger.steps = stem.steps();
    std::vector<DenseTensor> branch;
    for (int b : stem.branches) branch.push_back(detail::evaluate(tree, leaves, b, opt.kernel, flops));

    DenseTensor current = leaves[stem.tensors[0]];
    for (const auto& g : plan.groups) {
      GroupTransfers gt;
      const auto& next_set =
          sets::difference(tree.indices(stem.tensors[g.last_step + 1]), plan.process_slices);
      DenseTensor next = zeros_over(net, next_set);
      for (std::uint64_t sub = 0; sub < g.subtasks; ++sub) {
        const auto b = detail::assignment(g.secondary_slices, sub);
        DenseTensor resident = fix_indices(current, b);
        ++gt.loads;
        ++gt.subtasks;
        gt.max_resident_rank = std::max(gt.max_resident_rank, resident.rank_bits());
        for (int s = g.first_step; s <= g.last_step; ++s) {
          std::uint64_t m = 0;
          resident = detail::run_pair(resident, branch[s], opt.kernel, &m);
          flops.add(stem.tensors[s + 1] - n, m);
          gt.max_resident_rank = std::max(gt.max_resident_rank, resident.rank_bits());
          if (resident.rank_bits() > plan.capacity)
            throw InvariantError("execute_fused: resident rank " +
                                 std::to_string(resident.rank_bits()) + " exceeds capacity " +
                                 std::to_string(plan.capacity) + " at step " + std::to_string(s));
        }
        add_into(next, resident, b);
        ++gt.stores;
      }
      ledger.groups.push_back(gt);
      current = std::move(next);
    }
    parts[task] = std::move(current);
  });

  FusedExecution out{zeros_over(net, net.open_edges()), FlopCounter(tree.nodes().size()), {}};
  out.ledger.process_subtasks = count;
  out.ledger.steps = stem.steps();
  out.ledger.groups.resize(plan.groups.size());
  for (std::uint64_t k = 0; k < count; ++k) {
    add_into(out.result, parts[k], detail::assignment(plan.process_slices, k));
    out.flops.merge(counters[k]);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
      auto& dst = out.ledger.groups[g];
      const auto& src = ledgers[k].groups[g];
      dst.loads += src.loads;
      dst.stores += src.stores;
      dst.subtasks += src.subtasks;
      dst.max_resident_rank = std::max(dst.max_resident_rank, src.max_resident_rank);
    }
  }
  return out;
}

}  // namespace tnslicer

#endif  // TNSLICER_EXEC_HPP_
