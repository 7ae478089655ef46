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

#ifndef TNSLICER_BIG_COUNT_HPP_
#define TNSLICER_BIG_COUNT_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace tnslicer {

/// Unsigned arbitrary-precision integer restricted to what cost accounting
/// needs: adding powers of two and machine words, comparison, and lossy
/// conversion to floating point. Contraction costs are sums of 2^k with
/// integer k, so totals stay exact at any rank.
class BigCount {
 public:
  BigCount() = default;
  explicit BigCount(std::uint64_t v) {
    if (v != 0) limbs_.push_back(v);
  }

  static BigCount pow2(unsigned k) {
    BigCount b;
    b.add_pow2(k);
    return b;
  }

  void add_pow2(unsigned k) { add_at(k / 64, std::uint64_t{1} << (k % 64)); }

  void add(std::uint64_t v) { add_at(0, v); }

  BigCount& operator+=(const BigCount& o) {
    for (std::size_t i = 0; i < o.limbs_.size(); ++i) add_at(i, o.limbs_[i]);
    return *this;
  }

  friend BigCount operator+(BigCount a, const BigCount& b) { return a += b; }

  /// Multiplies by 2^k.
  BigCount shifted(unsigned k) const {
    if (is_zero()) return {};
    BigCount r;
    const unsigned words = k / 64;
    const unsigned bits = k % 64;
    r.limbs_.assign(limbs_.size() + words + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      r.limbs_[i + words] |= limbs_[i] << bits;
      if (bits != 0) r.limbs_[i + words + 1] |= limbs_[i] >> (64 - bits);
    }
    r.trim();
    return r;
  }

  bool is_zero() const { return limbs_.empty(); }

  /// Number of significant bits (0 for zero).
  unsigned bit_width() const {
    if (limbs_.empty()) return 0;
    return static_cast<unsigned>(64 * (limbs_.size() - 1) + std::bit_width(limbs_.back()));
  }

  bool is_power_of_two() const {
    if (limbs_.empty()) return false;
    for (std::size_t i = 0; i + 1 < limbs_.size(); ++i)
      if (limbs_[i] != 0) return false;
    return std::has_single_bit(limbs_.back());
  }

  bool fits_u64() const { return limbs_.size() <= 1; }
  std::uint64_t to_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

  /// Splits into mantissa * 2^exponent with the mantissa holding the top 64
  /// significant bits (truncated).
  void top_bits(std::uint64_t& mantissa, int& exponent) const {
    const unsigned w = bit_width();
    if (w <= 64) {
      mantissa = to_u64();
      exponent = 0;
      return;
    }
    const unsigned shift = w - 64;
    mantissa = extract(shift);
    exponent = static_cast<int>(shift);
  }

  long double to_long_double() const {
    std::uint64_t m;
    int e;
    top_bits(m, e);
    return std::ldexp(static_cast<long double>(m), e);
  }

  double to_double() const { return static_cast<double>(to_long_double()); }

  /// log2 of the value; exact for powers of two. -inf for zero.
  double log2() const {
    if (is_zero()) return -INFINITY;
    if (is_power_of_two()) return static_cast<double>(bit_width() - 1);
    std::uint64_t m;
    int e;
    top_bits(m, e);
    return static_cast<double>(std::log2(static_cast<long double>(m)) + e);
  }

  std::string to_string() const {
    if (limbs_.empty()) return "0";
    std::vector<std::uint32_t> parts;
    for (auto l : limbs_) {
      parts.push_back(static_cast<std::uint32_t>(l));
      parts.push_back(static_cast<std::uint32_t>(l >> 32));
    }
    std::string digits;
    while (!parts.empty()) {
      std::uint64_t rem = 0;
      for (std::size_t i = parts.size(); i-- > 0;) {
        const std::uint64_t cur = (rem << 32) | parts[i];
        parts[i] = static_cast<std::uint32_t>(cur / 1000000000u);
        rem = cur % 1000000000u;
      }
      while (!parts.empty() && parts.back() == 0) parts.pop_back();
      for (int d = 0; d < 9; ++d) {
        digits.push_back(static_cast<char>('0' + rem % 10));
        rem /= 10;
        if (parts.empty() && rem == 0) break;
      }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::reverse(digits.begin(), digits.end());
    return digits;
  }

  friend bool operator==(const BigCount& a, const BigCount& b) = default;

  friend std::strong_ordering operator<=>(const BigCount& a, const BigCount& b) {
    if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() <=> b.limbs_.size();
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
    }
    return std::strong_ordering::equal;
  }

 private:
  void add_at(std::size_t word, std::uint64_t v) {
    if (v == 0) return;
    if (limbs_.size() <= word) limbs_.resize(word + 1, 0);
    std::uint64_t carry = v;
    for (std::size_t i = word; carry != 0; ++i) {
      if (i == limbs_.size()) limbs_.push_back(0);
      const std::uint64_t before = limbs_[i];
      limbs_[i] = before + carry;
      carry = limbs_[i] < before ? 1 : 0;
    }
  }

  std::uint64_t extract(unsigned shift) const {
    const std::size_t word = shift / 64;
    const unsigned bits = shift % 64;
    std::uint64_t lo = limbs_[word] >> bits;
    if (bits != 0 && word + 1 < limbs_.size()) lo |= limbs_[word + 1] << (64 - bits);
    return lo;
  }

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  }

  std::vector<std::uint64_t> limbs_;  // little-endian
};

/// a / b evaluated from the top 64 bits of each operand. Deterministic, so
/// two equal pairs of counts always produce bit-identical ratios.
inline double ratio(const BigCount& a, const BigCount& b) {
  std::uint64_t ma, mb;
  int ea, eb;
  a.top_bits(ma, ea);
  b.top_bits(mb, eb);
  const long double q = static_cast<long double>(ma) / static_cast<long double>(mb);
  return static_cast<double>(std::ldexp(q, ea - eb));
}

}  // namespace tnslicer

#endif  // TNSLICER_BIG_COUNT_HPP_
