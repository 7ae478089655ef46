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

#ifndef TNSLICER_TENSOR_HPP_
#define TNSLICER_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tnslicer/common.hpp"
#include "tnslicer/network.hpp"
#include "tnslicer/permutation.hpp"
#include "tnslicer/rng.hpp"

namespace tnslicer {

using Scalar = std::complex<double>;

/// Row-major dense tensor; dimension d has extent 2^log2_extents[d].
struct DenseTensor {
  std::vector<EdgeId> order;
  std::vector<int> log2_extents;
  std::vector<Scalar> data;

  int rank_bits() const {
    int b = 0;
    for (int x : log2_extents) b += x;
    return b;
  }
  std::uint64_t size() const { return std::uint64_t{1} << rank_bits(); }

  int position(EdgeId e) const {
    const auto it = std::find(order.begin(), order.end(), e);
    return it == order.end() ? -1 : static_cast<int>(it - order.begin());
  }

  void check() const {
    if (order.size() != log2_extents.size())
      throw ValidationError("tensor: order and extents differ in length");
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("tensor: duplicate index");
    if (data.size() != size()) throw ValidationError("tensor: data length does not match extents");
  }

  static DenseTensor zeros(std::vector<EdgeId> order, std::vector<int> log2_extents) {
    DenseTensor t{std::move(order), std::move(log2_extents), {}};
    t.data.assign(t.size(), Scalar{});
    return t;
  }
};

/// Tensor over the sorted index set `s` with extents taken from `net`.
inline DenseTensor zeros_over(const TensorNetwork& net, const IndexSet& s) {
  std::vector<int> ext;
  for (EdgeId e : s) ext.push_back(net.weight(e));
  return DenseTensor::zeros(s, ext);
}

/// Entries drawn uniformly from the unit square, seeded per call.
inline DenseTensor random_tensor(const TensorNetwork& net, const IndexSet& s, RandomStream& rng) {
  auto t = zeros_over(net, s);
  for (auto& x : t.data) x = Scalar(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return t;
}

/// Transposes `t` into `target` order using a reduced gather map.
inline DenseTensor permuted(const DenseTensor& t, const std::vector<EdgeId>& target) {
  if (target == t.order) return t;
  if (target.size() != t.order.size()) throw ValidationError("permuted: index sets differ");
  std::vector<int> perm;
  for (EdgeId e : target) {
    const int p = t.position(e);
    if (p < 0) throw ValidationError("permuted: index sets differ");
    perm.push_back(p);
  }
  // Prefer whichever anchor stores the smaller map.
  auto front = plan_permutation_to(t.log2_extents, perm, Anchor::kFront);
  auto back = plan_permutation_to(t.log2_extents, perm, Anchor::kBack);
  const auto& plan = front.map_size_divisor >= back.map_size_divisor ? front : back;
  DenseTensor out;
  out.order = target;
  for (int p : perm) out.log2_extents.push_back(t.log2_extents[p]);
  out.data = apply_permutation(plan, t.data);
  return out;
}

/// Sub-tensor with the given (index, value) pairs fixed. Pairs whose index
/// the tensor lacks are ignored.
inline DenseTensor fix_indices(const DenseTensor& t,
                               const std::vector<std::pair<EdgeId, std::uint64_t>>& fixed) {
  const auto stride = detail::row_major_strides(t.log2_extents);
  std::uint64_t base = 0;
  std::vector<bool> drop(t.order.size(), false);
  for (const auto& [e, v] : fixed) {
    const int p = t.position(e);
    if (p < 0) continue;
    if (v >= (std::uint64_t{1} << t.log2_extents[p]))
      throw ValidationError("fix_indices: value out of range");
    base += v * stride[p];
    drop[p] = true;
  }
  DenseTensor out;
  std::vector<int> keep;
  for (int p = 0; p < static_cast<int>(t.order.size()); ++p)
    if (!drop[p]) {
      keep.push_back(p);
      out.order.push_back(t.order[p]);
      out.log2_extents.push_back(t.log2_extents[p]);
    }
  out.data.resize(out.size());
  std::vector<std::uint64_t> coord(keep.size(), 0);
  for (std::uint64_t i = 0; i < out.data.size(); ++i) {
    std::uint64_t src = base;
    for (std::size_t k = 0; k < keep.size(); ++k) src += coord[k] * stride[keep[k]];
    out.data[i] = t.data[src];
    for (std::size_t k = keep.size(); k-- > 0;) {
      if (++coord[k] < (std::uint64_t{1} << out.log2_extents[k])) break;
      coord[k] = 0;
    }
  }
  return out;
}

/// Adds `part` into the block of `full` selected by `fixed`; the remaining
/// dimensions of `full` must be exactly those of `part`.
inline void add_into(DenseTensor& full, const DenseTensor& part,
                     const std::vector<std::pair<EdgeId, std::uint64_t>>& fixed) {
  const auto stride = detail::row_major_strides(full.log2_extents);
  std::uint64_t base = 0;
  for (const auto& [e, v] : fixed) {
    const int p = full.position(e);
    if (p >= 0) base += v * stride[p];
  }
  std::vector<std::uint64_t> part_stride;
  for (EdgeId e : part.order) {
    const int p = full.position(e);
    if (p < 0) throw ValidationError("add_into: index missing from the destination");
    part_stride.push_back(stride[p]);
  }
  std::vector<std::uint64_t> coord(part.order.size(), 0);
  for (std::uint64_t i = 0; i < part.data.size(); ++i) {
    std::uint64_t dst = base;
    for (std::size_t k = 0; k < coord.size(); ++k) dst += coord[k] * part_stride[k];
    full.data[dst] += part.data[i];
    for (std::size_t k = coord.size(); k-- > 0;) {
      if (++coord[k] < (std::uint64_t{1} << part.log2_extents[k])) break;
      coord[k] = 0;
    }
  }
}

namespace detail {

struct PairLayout {
  std::vector<EdgeId> a_kept, b_kept, shared;
  int m_bits = 0, n_bits = 0, k_bits = 0;
};

inline PairLayout pair_layout(const DenseTensor& a, const DenseTensor& b) {
  PairLayout l;
  for (std::size_t p = 0; p < a.order.size(); ++p) {
    const int q = b.position(a.order[p]);
    if (q < 0) {
      l.a_kept.push_back(a.order[p]);
      l.m_bits += a.log2_extents[p];
    } else {
      if (a.log2_extents[p] != b.log2_extents[q])
        throw ValidationError("contract: extent mismatch on a shared index");
      l.shared.push_back(a.order[p]);
      l.k_bits += a.log2_extents[p];
    }
  }
  for (std::size_t q = 0; q < b.order.size(); ++q)
    if (a.position(b.order[q]) < 0) {
      l.b_kept.push_back(b.order[q]);
      l.n_bits += b.log2_extents[q];
    }
  return l;
}

inline DenseTensor output_shell(const DenseTensor& a, const DenseTensor& b, const PairLayout& l) {
  DenseTensor c;
  for (EdgeId e : l.a_kept) {
    c.order.push_back(e);
    c.log2_extents.push_back(a.log2_extents[a.position(e)]);
  }
  for (EdgeId e : l.b_kept) {
    c.order.push_back(e);
    c.log2_extents.push_back(b.log2_extents[b.position(e)]);
  }
  c.data.assign(c.size(), Scalar{});
  return c;
}

}  // namespace detail

/// Contracts every shared index of `a` and `b`. Output order is a's kept
/// indices followed by b's. Transposes both operands into matrix layout and
/// multiplies; `multiplies` receives M * N * K.
inline DenseTensor contract_pair(const DenseTensor& a, const DenseTensor& b,
                                 std::uint64_t* multiplies = nullptr) {
  const auto l = detail::pair_layout(a, b);
  auto a_target = l.a_kept;
  a_target.insert(a_target.end(), l.shared.begin(), l.shared.end());
  auto b_target = l.shared;
  b_target.insert(b_target.end(), l.b_kept.begin(), l.b_kept.end());
  const DenseTensor am = permuted(a, a_target);
  const DenseTensor bm = permuted(b, b_target);
  DenseTensor c = detail::output_shell(a, b, l);
  const std::uint64_t m = std::uint64_t{1} << l.m_bits;
  const std::uint64_t n = std::uint64_t{1} << l.n_bits;
  const std::uint64_t k = std::uint64_t{1} << l.k_bits;
  for (std::uint64_t i = 0; i < m; ++i) {
    Scalar* crow = c.data.data() + i * n;
    for (std::uint64_t kk = 0; kk < k; ++kk) {
      const Scalar x = am.data[i * k + kk];
      const Scalar* brow = bm.data.data() + kk * n;
      for (std::uint64_t j = 0; j < n; ++j) crow[j] += x * brow[j];
    }
  }
  if (multiplies) *multiplies = m * n * k;
  return c;
}

/// Same contraction with one loop per index and no transposition.
inline DenseTensor contract_pair_naive(const DenseTensor& a, const DenseTensor& b,
                                       std::uint64_t* multiplies = nullptr) {
  const auto l = detail::pair_layout(a, b);
  DenseTensor c = detail::output_shell(a, b, l);
  const auto sa = detail::row_major_strides(a.log2_extents);
  const auto sb = detail::row_major_strides(b.log2_extents);
  const auto sc = detail::row_major_strides(c.log2_extents);
  // Loop variables: output indices then shared ones.
  std::vector<EdgeId> vars = c.order;
  vars.insert(vars.end(), l.shared.begin(), l.shared.end());
  std::vector<int> bits;
  std::vector<std::uint64_t> da, db, dc;
  for (EdgeId e : vars) {
    const int pa = a.position(e), pb = b.position(e), pc = c.position(e);
    bits.push_back(pa >= 0 ? a.log2_extents[pa] : b.log2_extents[pb]);
    da.push_back(pa >= 0 ? sa[pa] : 0);
    db.push_back(pb >= 0 ? sb[pb] : 0);
    dc.push_back(pc >= 0 ? sc[pc] : 0);
  }
  std::vector<std::uint64_t> coord(vars.size(), 0);
  std::uint64_t total = 1;
  for (int x : bits) total <<= x;
  for (std::uint64_t it = 0; it < total; ++it) {
    std::uint64_t ia = 0, ib = 0, ic = 0;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      ia += coord[v] * da[v];
      ib += coord[v] * db[v];
      ic += coord[v] * dc[v];
    }
    c.data[ic] += a.data[ia] * b.data[ib];
    for (std::size_t v = vars.size(); v-- > 0;) {
      if (++coord[v] < (std::uint64_t{1} << bits[v])) break;
      coord[v] = 0;
    }
  }
  if (multiplies) *multiplies = total;
  return c;
}

/// max |a - b| / max(max |b|, tiny), after aligning a to b's order.
inline double relative_error(const DenseTensor& a, const DenseTensor& b) {
  const DenseTensor x = permuted(a, b.order);
  if (x.data.size() != b.data.size()) throw ValidationError("relative_error: shape mismatch");
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    diff = std::max(diff, std::abs(x.data[i] - b.data[i]));
    scale = std::max(scale, std::abs(b.data[i]));
  }
  return diff / std::max(scale, 1e-300);
}

}  // namespace tnslicer

#endif  // TNSLICER_TENSOR_HPP_
