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

#ifndef TNSLICER_COMMON_HPP_
#define TNSLICER_COMMON_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnslicer {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kFormatTag = "tn-slicer/v1";

/// Dense position of an index inside a TensorNetwork. Positions follow the
/// lexicographic order of the index labels, so comparing two EdgeIds is the
/// same as comparing their labels.
using EdgeId = std::uint32_t;

/// Sorted, duplicate-free list of EdgeIds.
using IndexSet = std::vector<EdgeId>;

/// Input that violates a documented precondition or file schema.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input for which no plan exists (pool exhausted, step that
/// cannot fit the scratchpad, flop guard exceeded).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed; always a bug in the caller or here.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace sets {

inline bool contains(const IndexSet& s, EdgeId e) {
  return std::binary_search(s.begin(), s.end(), e);
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet symmetric_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

inline int intersection_size(const IndexSet& a, const IndexSet& b) {
  int n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline IndexSet normalized(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace sets
}  // namespace tnslicer

#endif  // TNSLICER_COMMON_HPP_
