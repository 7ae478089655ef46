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

// Reduced gather maps for tensor transposition.
//
// A permutation of a row-major tensor is a gather map out[i] = in[map[i]].
// When a run of dimensions keeps its relative layout, the map is periodic and
// only a fraction of it has to be stored:
//
//   * a leading run of unmoved dimensions (anchor kFront) splits the tensor
//     into 2^bits identical blocks of size B, so map[i] = (i / B) * B +
//     reduced[i % B];
//   * a trailing run that is contiguous in the input (anchor kBack) makes
//     map[i + k] = map[i] + k * offset for k < stride.

#ifndef TNSLICER_PERMUTATION_HPP_
#define TNSLICER_PERMUTATION_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tnslicer/common.hpp"

namespace tnslicer {

/// Which end of the target order carries the reusable run.
enum class Anchor { kFront, kBack };

/// Where the absorbed indices go in the target order.
enum class Side { kFront, kBack };

inline const char* to_string(Side s) { return s == Side::kFront ? "front" : "back"; }

struct PermutationPlan {
  std::vector<int> perm;          // target position -> input dimension
  std::vector<int> log2_extents;  // per input dimension
  Anchor anchor = Anchor::kFront;
  int fixed_run = 0;              // dimensions in the reusable run
  std::uint64_t map_size_divisor = 1;
  std::uint64_t stride = 1;   // entries rebuilt from one stored entry
  std::uint64_t step = 1;     // distance between those entries in target order
  std::uint64_t offset = 0;   // source increment per rebuilt entry
  std::vector<std::uint64_t> reduced_map;

  int rank() const { return static_cast<int>(perm.size()); }

  std::uint64_t size() const {
    int bits = 0;
    for (int b : log2_extents) bits += b;
    return std::uint64_t{1} << bits;
  }

  /// Source offset of target element i.
  std::uint64_t source(std::uint64_t i) const {
    if (anchor == Anchor::kFront) return (i / step) * offset + reduced_map[i % step];
    return reduced_map[i / stride] + (i % stride) * offset;
  }

  std::vector<std::uint64_t> full_map() const {
    std::vector<std::uint64_t> m(size());
    for (std::uint64_t i = 0; i < m.size(); ++i) m[i] = source(i);
    return m;
  }
};

namespace detail {

inline std::vector<std::uint64_t> row_major_strides(const std::vector<int>& log2_extents) {
  std::vector<std::uint64_t> s(log2_extents.size());
  std::uint64_t acc = 1;
  for (std::size_t d = log2_extents.size(); d-- > 0;) {
    s[d] = acc;
    acc <<= log2_extents[d];
  }
  return s;
}

inline void check_perm(const std::vector<int>& log2_extents, const std::vector<int>& perm) {
  if (perm.size() != log2_extents.size())
    throw ValidationError("permutation rank does not match the extents");
  std::vector<bool> seen(perm.size(), false);
  int bits = 0;
  for (int p : perm) {
    if (p < 0 || p >= static_cast<int>(perm.size()) || seen[p])
      throw ValidationError("not a permutation");
    seen[p] = true;
  }
  for (int b : log2_extents) {
    if (b < 0) throw ValidationError("negative extent");
    bits += b;
  }
  if (bits > 40) throw ValidationError("permutation too large to map");
}

}  // namespace detail

/// Full gather map computed coordinate by coordinate.
inline std::vector<std::uint64_t> naive_permutation_map(const std::vector<int>& log2_extents,
                                                        const std::vector<int>& perm) {
  detail::check_perm(log2_extents, perm);
  const auto in_stride = detail::row_major_strides(log2_extents);
  const int r = static_cast<int>(perm.size());
  std::vector<int> target_bits(r);
  for (int p = 0; p < r; ++p) target_bits[p] = log2_extents[perm[p]];
  std::uint64_t n = 1;
  for (int b : log2_extents) n <<= b;
  std::vector<std::uint64_t> map(n);
  std::vector<std::uint64_t> coord(r, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t src = 0;
    for (int p = 0; p < r; ++p) src += coord[p] * in_stride[perm[p]];
    map[i] = src;
    for (int p = r - 1; p >= 0; --p) {
      if (++coord[p] < (std::uint64_t{1} << target_bits[p])) break;
      coord[p] = 0;
    }
  }
  return map;
}

/// Plans the transposition `perm` (target position -> input dimension).
inline PermutationPlan plan_permutation_to(const std::vector<int>& log2_extents,
                                           const std::vector<int>& perm, Anchor anchor) {
  detail::check_perm(log2_extents, perm);
  PermutationPlan plan;
  plan.perm = perm;
  plan.log2_extents = log2_extents;
  plan.anchor = anchor;
  const int r = static_cast<int>(perm.size());
  const auto in_stride = detail::row_major_strides(log2_extents);
  const std::uint64_t n = plan.size();
  const auto map = naive_permutation_map(log2_extents, perm);

  int run = 0;
  int bits = 0;
  if (anchor == Anchor::kFront) {
    while (run < r && perm[run] == run) bits += log2_extents[perm[run++]];
    plan.step = n >> bits;    // block size
    plan.stride = std::uint64_t{1} << bits;
    plan.offset = plan.step;  // blocks are copied whole
    plan.reduced_map.assign(map.begin(), map.begin() + static_cast<long>(plan.step));
  } else {
    if (r > 0) {
      run = 1;
      while (run < r && perm[r - run - 1] + 1 == perm[r - run]) ++run;
    }
    for (int p = r - run; p < r; ++p) bits += log2_extents[perm[p]];
    plan.stride = std::uint64_t{1} << bits;
    plan.step = 1;
    plan.offset = r > 0 ? in_stride[perm[r - 1]] : 1;
    for (std::uint64_t i = 0; i < n; i += plan.stride) plan.reduced_map.push_back(map[i]);
  }
  plan.fixed_run = run;
  plan.map_size_divisor = plan.stride;
  return plan;
}

/// Moves `absorbed` to one end of `input_order`, keeping both groups in
/// input order, and plans the transposition. With the absorbed indices at
/// the back the leading run is reused, otherwise the trailing one.
template <typename Index>
PermutationPlan plan_permutation(const std::vector<Index>& input_order,
                                 const std::vector<Index>& absorbed, Side side,
                                 std::vector<int> log2_extents = {}) {
  if (input_order.empty()) throw ValidationError("plan_permutation: empty input order");
  if (log2_extents.empty()) log2_extents.assign(input_order.size(), 1);
  if (log2_extents.size() != input_order.size())
    throw ValidationError("plan_permutation: extents do not match the input order");
  auto is_absorbed = [&](const Index& x) {
    return std::find(absorbed.begin(), absorbed.end(), x) != absorbed.end();
  };
  for (const auto& a : absorbed)
    if (std::find(input_order.begin(), input_order.end(), a) == input_order.end())
      throw ValidationError("plan_permutation: absorbed index not in the input order");
  std::vector<int> kept, moved;
  for (int d = 0; d < static_cast<int>(input_order.size()); ++d)
    (is_absorbed(input_order[d]) ? moved : kept).push_back(d);
  std::vector<int> perm = side == Side::kBack ? kept : moved;
  const auto& tail = side == Side::kBack ? moved : kept;
  perm.insert(perm.end(), tail.begin(), tail.end());
  return plan_permutation_to(log2_extents, perm,
                             side == Side::kBack ? Anchor::kFront : Anchor::kBack);
}

/// out[i] = in[plan.source(i)].
template <typename T>
std::vector<T> apply_permutation(const PermutationPlan& plan, const std::vector<T>& in) {
  if (in.size() != plan.size()) throw ValidationError("apply_permutation: size mismatch");
  std::vector<T> out(in.size());
  const std::uint64_t n = plan.size();
  if (plan.anchor == Anchor::kFront) {
    const std::uint64_t b = plan.step;
    for (std::uint64_t blk = 0; blk < n; blk += b)
      for (std::uint64_t k = 0; k < b; ++k) out[blk + k] = in[blk + plan.reduced_map[k]];
  } else {
    for (std::uint64_t o = 0; o < plan.reduced_map.size(); ++o) {
      const std::uint64_t base = plan.reduced_map[o];
      T* dst = out.data() + o * plan.stride;
      for (std::uint64_t k = 0; k < plan.stride; ++k) dst[k] = in[base + k * plan.offset];
    }
  }
  return out;
}

}  // namespace tnslicer

#endif  // TNSLICER_PERMUTATION_HPP_
