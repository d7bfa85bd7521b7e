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

#include "svex/shapley.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "svex/fixtures.hpp"
#include "svex/game.hpp"
#include "svex/rng.hpp"

using svex::CoalitionGame;
using svex::FeatureSet;

namespace {

// Independent brute-force Shapley oracle: a plain double loop over
// (player, bitmask) pairs with factorial-ratio weights. Shares no code with
// the solvers under test.
std::vector<double> naive_shapley(int n,
                                  const std::function<double(std::uint64_t)>& v) {
  std::vector<double> fact(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k <= n; ++k)
    fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k - 1)] * k;

  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      if (mask & (1ULL << r)) continue;
      int size = 0;
      for (int b = 0; b < n; ++b)
        if (mask & (1ULL << b)) ++size;
      const double w = fact[static_cast<std::size_t>(size)] *
                       fact[static_cast<std::size_t>(n - 1 - size)] /
                       fact[static_cast<std::size_t>(n)];
      phi[static_cast<std::size_t>(r)] += w * (v(mask | (1ULL << r)) - v(mask));
    }
  }
  return phi;
}

}  // namespace

TEST_CASE("subset form reproduces the or-gate contributions") {
  CoalitionGame game = svex::fixtures::or_gate_game();
  const svex::Attribution attr = svex::exact_shapley_subset(game);
  const double expected = 0.5 * std::log2(4.0 / 3.0);
  REQUIRE(std::abs(attr.phi[0] - expected) <= 1e-12);
  REQUIRE(std::abs(attr.phi[1] - expected) <= 1e-12);
  REQUIRE(attr.method == svex::Method::Exact);
  // Efficiency: the two shares add up to the grand coalition's value.
  REQUIRE(std::abs(attr.phi[0] + attr.phi[1] - std::log2(4.0 / 3.0)) <= 1e-9);
}

TEST_CASE("constant game attributes nothing") {
  CoalitionGame game(5, [](const FeatureSet&) { return 0.0; });
  const auto attr = svex::exact_shapley_subset(game);
  for (double p : attr.phi) REQUIRE(p == 0.0);
}

TEST_CASE("subset form matches the naive double-loop oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CoalitionGame game = svex::fixtures::random_uniform_game(8, seed);
    const auto attr = svex::exact_shapley_subset(game);
    const auto expected = naive_shapley(8, [&](std::uint64_t mask) {
      return game.value(svex::detail::mask_to_set(8, mask));
    });
    for (int r = 0; r < 8; ++r) {
      REQUIRE(std::abs(attr.phi[static_cast<std::size_t>(r)] -
                       expected[static_cast<std::size_t>(r)]) <= 1e-12);
    }
    REQUIRE(game.value_calls() <= (1ULL << 8));
  }
}

TEST_CASE("permutation form agrees with the or-gate example") {
  CoalitionGame game = svex::fixtures::or_gate_game();
  const auto attr = svex::exact_shapley_permutation(game);
  const double expected = 0.5 * std::log2(4.0 / 3.0);
  REQUIRE(std::abs(attr.phi[0] - expected) <= 1e-12);
  REQUIRE(std::abs(attr.phi[1] - expected) <= 1e-12);
  REQUIRE(attr.method == svex::Method::ExactPermutation);
}

TEST_CASE("single-player game has a single permutation") {
  CoalitionGame game(1, [](const FeatureSet& s) { return s.empty() ? 0.0 : 2.5; });
  const auto attr = svex::exact_shapley_permutation(game);
  REQUIRE(attr.phi == std::vector<double>{2.5});
}

TEST_CASE("subset and permutation forms are equivalent") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    CoalitionGame game = svex::fixtures::random_uniform_game(7, seed);
    const auto by_subset = svex::exact_shapley_subset(game);
    const auto by_perm = svex::exact_shapley_permutation(game);
    for (int r = 0; r < 7; ++r) {
      REQUIRE(std::abs(by_subset.phi[static_cast<std::size_t>(r)] -
                       by_perm.phi[static_cast<std::size_t>(r)]) <= 1e-12);
    }
  }
}

TEST_CASE("restricted form over the full context equals the subset form") {
  CoalitionGame game = svex::fixtures::random_uniform_game(6, 42);
  const auto attr = svex::exact_shapley_subset(game);
  for (int r = 0; r < 6; ++r) {
    const double restricted = svex::restricted_exact_shapley(
        [&](const FeatureSet& s) { return game.value(s); }, game.full_set(), r);
    REQUIRE(std::abs(restricted - attr.phi[static_cast<std::size_t>(r)]) <= 1e-12);
  }
}

TEST_CASE("size limits refuse with monte carlo guidance") {
  CoalitionGame big(21, [](const FeatureSet&) { return 0.0; });
  REQUIRE_THROWS_WITH(svex::exact_shapley_subset(big),
                      Catch::Matchers::ContainsSubstring("Monte Carlo"));
  CoalitionGame wide(11, [](const FeatureSet&) { return 0.0; });
  REQUIRE_THROWS_AS(svex::exact_shapley_permutation(wide), svex::Error);
  // Limits are configurable.
  REQUIRE_NOTHROW(svex::exact_shapley_subset(big, 22));
}

TEST_CASE("non-finite values identify the offending coalition") {
  CoalitionGame game(3, [](const FeatureSet& s) {
    if (s.contains(1) && s.count() == 1)
      return std::numeric_limits<double>::quiet_NaN();
    return 1.0;
  });
  REQUIRE_THROWS_WITH(svex::exact_shapley_subset(game),
                      Catch::Matchers::ContainsSubstring("{1}"));
}

TEST_CASE("empty coalition is worth zero without consulting the function") {
  CoalitionGame game(3, [](const FeatureSet&) { return 99.0; });
  REQUIRE(game.value(game.empty_set()) == 0.0);
  REQUIRE(game.value_calls() == 0);
}

TEST_CASE("memoization evaluates each coalition once") {
  int raw_calls = 0;
  CoalitionGame game(6, [&raw_calls](const FeatureSet& s) {
    ++raw_calls;
    return static_cast<double>(s.count());
  });
  (void)svex::exact_shapley_subset(game);
  (void)svex::exact_shapley_subset(game);
  REQUIRE(game.value_calls() <= (1ULL << 6));
  REQUIRE(static_cast<std::uint64_t>(raw_calls) == game.value_calls());
}

TEST_CASE("identical games produce bit-identical attributions") {
  for (std::uint64_t seed : {3ULL, 17ULL}) {
    CoalitionGame a = svex::fixtures::random_uniform_game(7, seed);
    CoalitionGame b = svex::fixtures::random_uniform_game(7, seed);
    const auto pa = svex::exact_shapley_subset(a);
    const auto pb = svex::exact_shapley_subset(b);
    REQUIRE(std::memcmp(pa.phi.data(), pb.phi.data(),
                        pa.phi.size() * sizeof(double)) == 0);
  }
}
