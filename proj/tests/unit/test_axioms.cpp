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

#include "svex/axioms.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "svex/fixtures.hpp"

using svex::CoalitionGame;
using svex::FeatureSet;

TEST_CASE("or-gate attribution satisfies all four axioms") {
  CoalitionGame game = svex::fixtures::or_gate_game();
  const auto attr = svex::exact_shapley_subset(game);
  const auto rep = svex::verify_axioms(game, attr);
  REQUIRE(rep.all_ok());
  // The two features are interchangeable and split the value evenly.
  REQUIRE(rep.interchangeable_pairs == 1);
  REQUIRE(rep.symmetry_residual == 0.0);
}

TEST_CASE("dummy player receives zero") {
  // v(S) = |S intersect {0}|: feature 1 never contributes.
  CoalitionGame game(2, [](const FeatureSet& s) {
    return s.contains(0) ? 1.0 : 0.0;
  });
  const auto attr = svex::exact_shapley_subset(game);
  const auto rep = svex::verify_axioms(game, attr);
  REQUIRE(rep.dummy_players == 1);
  REQUIRE(attr.phi[1] == 0.0);
  REQUIRE(rep.dummy_ok);
}

TEST_CASE("additivity holds on a random game pair") {
  CoalitionGame g = svex::fixtures::random_uniform_game(6, 2024);
  CoalitionGame h = svex::fixtures::random_uniform_game(6, 2025);
  CoalitionGame base = svex::fixtures::random_uniform_game(6, 2026);
  const auto attr = svex::exact_shapley_subset(base);
  const auto rep = svex::verify_axioms(base, attr, &g, &h);
  REQUIRE(rep.additivity_ok);
  REQUIRE(rep.additivity_residual <= 1e-12);
}

TEST_CASE("axiom checks on 100 random games stay within 1e-9") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CoalitionGame game = svex::fixtures::random_uniform_game(6, seed);
    const auto attr = svex::exact_shapley_subset(game);
    const auto rep = svex::verify_axioms(game, attr);
    REQUIRE(rep.all_ok());
    REQUIRE(rep.efficiency_residual <= 1e-9);
  }
}

TEST_CASE("mismatched attribution is rejected") {
  CoalitionGame game = svex::fixtures::or_gate_game();
  svex::Attribution attr;
  attr.phi = {0.1, 0.1, 0.1};
  REQUIRE_THROWS_AS(svex::verify_axioms(game, attr), svex::Error);
}

TEST_CASE("oversized games are rejected") {
  CoalitionGame game(17, [](const FeatureSet&) { return 0.0; });
  svex::Attribution attr;
  attr.phi.assign(17, 0.0);
  REQUIRE_THROWS_AS(svex::verify_axioms(game, attr), svex::Error);
}
