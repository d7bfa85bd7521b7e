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

#ifndef SVEX_SHAPLEY_HPP
#define SVEX_SHAPLEY_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/game.hpp"
#include "svex/numeric.hpp"

namespace svex {

inline constexpr int kDefaultExactLimit = 20;
inline constexpr int kDefaultPermutationLimit = 10;

namespace detail {

inline FeatureSet mask_to_set(int n, std::uint64_t mask) {
  FeatureSet s(n);
  while (mask) {
    const int b = std::countr_zero(mask);
    s.insert(b);
    mask &= mask - 1;
  }
  return s;
}

// Dense table of all 2^n coalition values, indexed by bitmask. Each value
// goes through the game so memoization and call accounting stay exact.
inline std::vector<double> dense_values(const CoalitionGame& game) {
  const int n = game.n_features();
  std::vector<double> vals(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < vals.size(); ++mask) {
    vals[mask] = game.value(mask_to_set(n, mask));
  }
  return vals;
}

}  // namespace detail

// Exact Shapley value by subset enumeration: for each feature r the weighted
// sum of marginal contributions v(S u {r}) - v(S) over all S not containing
// r, with weight |S|! (n-1-|S|)! / n!.
inline Attribution exact_shapley_subset(const CoalitionGame& game,
                                        int exact_limit = kDefaultExactLimit) {
  const int n = game.n_features();
  if (n > exact_limit) {
    throw usage_error(
        "exact subset-form Shapley needs 2^" + std::to_string(n) +
        " coalition values which exceeds the configured limit of 2^" +
        std::to_string(exact_limit) +
        "; raise the limit or use the Monte Carlo estimator");
  }

  const std::vector<double> vals = detail::dense_values(game);
  const std::vector<double> lf = log_factorials(n);
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) weight[static_cast<std::size_t>(s)] =
      shapley_subset_weight(lf, n, s);

  Attribution out;
  out.method = Method::Exact;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  const std::uint64_t limit = 1ULL << n;
  for (int r = 0; r < n; ++r) {
    const std::uint64_t bit = 1ULL << r;
    long double acc = 0.0L;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      acc += static_cast<long double>(weight[static_cast<std::size_t>(s)]) *
             (vals[mask | bit] - vals[mask]);
    }
    out.phi[static_cast<std::size_t>(r)] = static_cast<double>(acc);
  }
  out.value_calls = game.value_calls();
  return out;
}

// Exact Shapley value by full permutation enumeration: the average over all
// n! orders of the marginal contribution of each feature given its
// predecessors. Agrees with the subset form; kept as an independent route.
inline Attribution exact_shapley_permutation(
    const CoalitionGame& game, int permutation_limit = kDefaultPermutationLimit) {
  const int n = game.n_features();
  if (n > permutation_limit) {
    throw usage_error(
        "exact permutation-form Shapley enumerates " + std::to_string(n) +
        "! orders which exceeds the configured limit of " +
        std::to_string(permutation_limit) +
        "!; raise the limit or use the Monte Carlo estimator");
  }

  const std::vector<double> vals = detail::dense_values(game);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  std::uint64_t n_orders = 0;
  do {
    std::uint64_t prefix = 0;
    for (int pos = 0; pos < n; ++pos) {
      const int r = order[static_cast<std::size_t>(pos)];
      const std::uint64_t bit = 1ULL << r;
      acc[static_cast<std::size_t>(r)] += vals[prefix | bit] - vals[prefix];
      prefix |= bit;
    }
    ++n_orders;
  } while (std::next_permutation(order.begin(), order.end()));

  Attribution out;
  out.method = Method::ExactPermutation;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    out.phi[static_cast<std::size_t>(r)] = static_cast<double>(
        acc[static_cast<std::size_t>(r)] / static_cast<long double>(n_orders));
  }
  out.value_calls = game.value_calls();
  return out;
}

// Shapley value of feature r restricted to a context set C containing r:
//   (1/|C|) * sum_{S subseteq C\{r}} binom(|C|-1, |S|)^-1 (v(S u {r}) - v(S)).
// With C equal to the full feature set this is exactly the subset form.
// The value function is supplied by the caller (a game, or a restricted
// oracle-backed game), so the same weights serve both approximations.
template <typename ValueFn>
inline double restricted_exact_shapley(ValueFn&& value, const FeatureSet& context,
                                       int r) {
  if (!context.contains(r)) {
    throw usage_error("feature " + std::to_string(r) +
                      " is not in its own context " + context.to_string());
  }
  const int h = context.count();
  const std::vector<double> lf = log_factorials(h);
  long double acc = 0.0L;
  enumerate_subsets(context.without(r), [&](const FeatureSet& s) {
    const double w = shapley_subset_weight(lf, h, s.count());
    acc += static_cast<long double>(w) * (value(s.with(r)) - value(s));
  });
  return static_cast<double>(acc);
}

}  // namespace svex

#endif  // SVEX_SHAPLEY_HPP
