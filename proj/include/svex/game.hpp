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

#ifndef SVEX_GAME_HPP
#define SVEX_GAME_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "svex/error.hpp"
#include "svex/feature_set.hpp"

namespace svex {

// How an attribution vector was produced.
enum class Method {
  Exact,             // subset-form enumeration
  ExactPermutation,  // permutation-form enumeration
  CSVE,              // neighborhood-restricted
  HSVE,              // community-restricted
  MonteCarlo,        // permutation sampling
  Single,            // one-feature ablation baseline
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::ExactPermutation: return "exact-permutation";
    case Method::CSVE: return "csve";
    case Method::HSVE: return "hsve";
    case Method::MonteCarlo: return "montecarlo";
    case Method::Single: return "single";
  }
  return "?";
}

inline std::optional<Method> method_from_name(const std::string& s) {
  for (Method m : {Method::Exact, Method::ExactPermutation, Method::CSVE,
                   Method::HSVE, Method::MonteCarlo, Method::Single}) {
    if (s == method_name(m)) return m;
  }
  return std::nullopt;
}

// Per-feature prediction power plus the provenance needed to reproduce it.
struct Attribution {
  std::vector<double> phi;
  Method method = Method::Exact;
  std::optional<std::uint64_t> mc_samples;
  std::optional<std::uint64_t> seed;
  std::uint64_t value_calls = 0;
  // False where a feature was excluded from the run (partial explains).
  std::vector<bool> computed;
  // Set by aggregate_group: how many attributions were summed.
  std::optional<std::size_t> aggregated_count;
  // Set by normalize when no positive entry existed to scale by.
  bool degenerate_normalization = false;

  int n_features() const { return static_cast<int>(phi.size()); }

  bool is_computed(int r) const {
    return computed.empty() || computed[static_cast<std::size_t>(r)];
  }
};

// A finite cooperative game: n players and a characteristic function.
//
// The supplied function must be pure; values are memoized so each coalition
// is evaluated at most once, and value(empty) is 0 by definition without
// consulting the function. Lookups are safe from concurrent threads.
class CoalitionGame {
 public:
  using ValueFn = std::function<double(const FeatureSet&)>;

  CoalitionGame(int n_features, ValueFn value)
      : n_(n_features), state_(std::make_unique<State>(std::move(value))) {
    if (n_ <= 0) throw usage_error("a game needs at least one feature");
  }

  CoalitionGame(CoalitionGame&&) = default;
  CoalitionGame& operator=(CoalitionGame&&) = default;

  int n_features() const { return n_; }
  FeatureSet full_set() const { return FeatureSet::all(n_); }
  FeatureSet empty_set() const { return FeatureSet(n_); }

  double value(const FeatureSet& coalition) const {
    if (coalition.universe() != n_) {
      throw usage_error("coalition universe " +
                        std::to_string(coalition.universe()) +
                        " does not match game size " + std::to_string(n_));
    }
    if (coalition.empty()) return 0.0;

    Shard& shard = state_->shards[coalition.hash() & kShardMask];
    std::lock_guard<std::mutex> lock(shard.mu);
    auto it = shard.memo.find(coalition);
    if (it != shard.memo.end()) return it->second;

    state_->calls.fetch_add(1, std::memory_order_relaxed);
    const double v = state_->fn(coalition);
    if (!std::isfinite(v)) {
      throw validation_error("characteristic function returned a non-finite "
                             "value for coalition " + coalition.to_string());
    }
    shard.memo.emplace(coalition, v);
    return v;
  }

  std::uint64_t value_calls() const {
    return state_->calls.load(std::memory_order_relaxed);
  }

 private:
  static constexpr std::size_t kShardCount = 16;
  static constexpr std::size_t kShardMask = kShardCount - 1;

  struct Shard {
    std::mutex mu;
    std::unordered_map<FeatureSet, double, FeatureSetHash> memo;
  };
  struct State {
    explicit State(ValueFn f) : fn(std::move(f)) {}
    ValueFn fn;
    Shard shards[kShardCount];
    std::atomic<std::uint64_t> calls{0};
  };

  int n_;
  std::unique_ptr<State> state_;
};

// g + h: the game whose characteristic function is the pointwise sum.
inline CoalitionGame sum_game(const CoalitionGame& g, const CoalitionGame& h) {
  if (g.n_features() != h.n_features()) {
    throw usage_error("cannot sum games of different sizes");
  }
  return CoalitionGame(g.n_features(), [&g, &h](const FeatureSet& s) {
    return g.value(s) + h.value(s);
  });
}

// c * g for a scaling constant c.
inline CoalitionGame scale_game(const CoalitionGame& g, double c) {
  return CoalitionGame(g.n_features(),
                       [&g, c](const FeatureSet& s) { return c * g.value(s); });
}

}  // namespace svex

#endif  // SVEX_GAME_HPP
