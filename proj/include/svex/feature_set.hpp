/*
 * Copyright 2026 The svex authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SVEX_FEATURE_SET_HPP
#define SVEX_FEATURE_SET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "svex/error.hpp"

namespace svex {

// A subset of the feature universe {0..n-1}. One 64-bit word for n <= 64
// (the common case); wider universes fall back to a word vector, keeping
// membership, union, complement and iteration linear in n/64.
//
// Iteration and subset enumeration are deterministic: members ascend by
// index and subsets follow binary counting over the member positions.
class FeatureSet {
 public:
  FeatureSet() : universe_(0) {}

  explicit FeatureSet(int universe) : universe_(check_universe(universe)) {
    words_.assign(word_count(universe_), 0);
  }

  FeatureSet(int universe, std::initializer_list<int> members)
      : FeatureSet(universe) {
    for (int m : members) insert(m);
  }

  static FeatureSet all(int universe) {
    FeatureSet s(universe);
    for (std::size_t w = 0; w < s.words_.size(); ++w) s.words_[w] = ~0ULL;
    s.trim();
    return s;
  }

  int universe() const { return universe_; }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool contains(int i) const {
    check_index(i);
    return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  }

  void insert(int i) {
    check_index(i);
    words_[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63);
  }

  void erase(int i) {
    check_index(i);
    words_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63));
  }

  FeatureSet with(int i) const {
    FeatureSet s = *this;
    s.insert(i);
    return s;
  }

  FeatureSet without(int i) const {
    FeatureSet s = *this;
    s.erase(i);
    return s;
  }

  FeatureSet complement() const {
    FeatureSet s(universe_);
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] = ~words_[w];
    s.trim();
    return s;
  }

  FeatureSet set_union(const FeatureSet& o) const {
    check_same_universe(o);
    FeatureSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] |= o.words_[w];
    return s;
  }

  FeatureSet set_intersection(const FeatureSet& o) const {
    check_same_universe(o);
    FeatureSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] &= o.words_[w];
    return s;
  }

  FeatureSet set_difference(const FeatureSet& o) const {
    check_same_universe(o);
    FeatureSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] &= ~o.words_[w];
    return s;
  }

  bool is_subset_of(const FeatureSet& o) const {
    check_same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & ~o.words_[w]) return false;
    }
    return true;
  }

  // Members in ascending index order.
  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        out.push_back(static_cast<int>(w << 6) + b);
        bits &= bits - 1;
      }
    }
    return out;
  }

  bool operator==(const FeatureSet& o) const {
    return universe_ == o.universe_ && words_ == o.words_;
  }
  bool operator!=(const FeatureSet& o) const { return !(*this == o); }

  std::size_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^
                      static_cast<std::uint64_t>(universe_);
    for (auto w : words_) {
      h ^= w;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int m : members()) {
      if (!first) os << ',';
      os << m;
      first = false;
    }
    os << '}';
    return os.str();
  }

 private:
  static int check_universe(int n) {
    if (n < 0) throw usage_error("feature universe size must be >= 0");
    return n;
  }
  static std::size_t word_count(int n) {
    return static_cast<std::size_t>((n + 63) / 64);
  }
  void check_index(int i) const {
    if (i < 0 || i >= universe_) {
      throw usage_error("feature index " + std::to_string(i) +
                        " out of range for universe of size " +
                        std::to_string(universe_));
    }
  }
  void check_same_universe(const FeatureSet& o) const {
    if (universe_ != o.universe_) {
      throw usage_error("feature sets have different universes (" +
                        std::to_string(universe_) + " vs " +
                        std::to_string(o.universe_) + ")");
    }
  }
  void trim() {
    const int rem = universe_ & 63;
    if (rem != 0 && !words_.empty()) {
      words_.back() &= (1ULL << rem) - 1;
    }
  }

  int universe_;
  std::vector<std::uint64_t> words_;
};

struct FeatureSetHash {
  std::size_t operator()(const FeatureSet& s) const { return s.hash(); }
};

// Invokes fn once per subset of `context`, including the empty set and
// `context` itself, in binary counting order over the member positions.
// Capped at 2^25 subsets; the exact solvers enforce tighter limits first.
template <typename Fn>
inline void enumerate_subsets(const FeatureSet& context, Fn&& fn) {
  const std::vector<int> members = context.members();
  const int k = static_cast<int>(members.size());
  if (k > 25) {
    throw usage_error("subset enumeration over " + std::to_string(k) +
                      " features is not tractable; use the Monte Carlo path");
  }
  const std::uint64_t limit = 1ULL << k;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    FeatureSet s(context.universe());
    for (int b = 0; b < k; ++b) {
      if ((mask >> b) & 1ULL) s.insert(members[static_cast<std::size_t>(b)]);
    }
    fn(s);
  }
}

}  // namespace svex

#endif  // SVEX_FEATURE_SET_HPP
