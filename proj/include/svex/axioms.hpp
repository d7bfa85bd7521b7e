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

#ifndef SVEX_AXIOMS_HPP
#define SVEX_AXIOMS_HPP

#include <cmath>
#include <cstdlib>
#include <string>

#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/game.hpp"
#include "svex/shapley.hpp"

namespace svex {

// Result of checking an exact attribution against the four Shapley axioms.
// Residuals are absolute; a residual of 0 with zero detected pairs/players
// means the corresponding check was vacuous on this game.
struct AxiomReport {
  bool efficiency_ok = false;
  bool symmetry_ok = false;
  bool dummy_ok = false;
  bool additivity_ok = false;

  double efficiency_residual = 0.0;
  double symmetry_residual = 0.0;
  double dummy_residual = 0.0;
  double additivity_residual = 0.0;

  int interchangeable_pairs = 0;
  int dummy_players = 0;

  bool all_ok() const {
    return efficiency_ok && symmetry_ok && dummy_ok && additivity_ok;
  }
};

inline constexpr int kAxiomCheckLimit = 16;

namespace detail {

// Players i and j are interchangeable when v(S u {i}) = v(S u {j}) for
// every S avoiding both.
inline bool interchangeable(const CoalitionGame& g, int i, int j, double eps) {
  bool ok = true;
  FeatureSet rest = g.full_set().without(i).without(j);
  enumerate_subsets(rest, [&](const FeatureSet& s) {
    if (!ok) return;
    if (std::abs(g.value(s.with(i)) - g.value(s.with(j))) > eps) ok = false;
  });
  return ok;
}

// Player i is a dummy when v(S u {i}) = v(S) for every S avoiding i.
inline bool is_dummy(const CoalitionGame& g, int i, double eps) {
  bool ok = true;
  enumerate_subsets(g.full_set().without(i), [&](const FeatureSet& s) {
    if (!ok) return;
    if (std::abs(g.value(s.with(i)) - g.value(s)) > eps) ok = false;
  });
  return ok;
}

}  // namespace detail

// Checks Efficiency, Symmetry and Dummy on (game, attribution), and
// Additivity on the supplied game pair: the exact attribution of g + h must
// equal the sum of the exact attributions of g and h. When no pair is given
// the game is paired with itself, which checks phi(2v) = 2 phi(v).
//
// Symmetry and dummy detection enumerate all coalitions, so the game size
// is capped at 16 features. `tolerance` bounds the accepted residuals;
// `detection_eps` decides when two values count as equal during detection.
inline AxiomReport verify_axioms(const CoalitionGame& game,
                                 const Attribution& attr,
                                 const CoalitionGame* add_g = nullptr,
                                 const CoalitionGame* add_h = nullptr,
                                 double tolerance = 1e-9,
                                 double detection_eps = 1e-12) {
  const int n = game.n_features();
  if (attr.n_features() != n) {
    throw usage_error("attribution has " + std::to_string(attr.n_features()) +
                      " entries but the game has " + std::to_string(n));
  }
  if (n > kAxiomCheckLimit) {
    throw usage_error("axiom verification enumerates all coalitions and is "
                      "capped at " + std::to_string(kAxiomCheckLimit) +
                      " features");
  }
  if ((add_g == nullptr) != (add_h == nullptr)) {
    throw usage_error("additivity check needs both games of the pair");
  }

  AxiomReport rep;

  // Efficiency: the attribution distributes exactly v(N).
  double total = 0.0;
  for (double p : attr.phi) total += p;
  rep.efficiency_residual = std::abs(total - game.value(game.full_set()));
  rep.efficiency_ok = rep.efficiency_residual <= tolerance;

  // Symmetry: interchangeable players receive equal shares.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!detail::interchangeable(game, i, j, detection_eps)) continue;
      ++rep.interchangeable_pairs;
      const double d = std::abs(attr.phi[static_cast<std::size_t>(i)] -
                                attr.phi[static_cast<std::size_t>(j)]);
      rep.symmetry_residual = std::max(rep.symmetry_residual, d);
    }
  }
  rep.symmetry_ok = rep.symmetry_residual <= tolerance;

  // Dummy: players that never change any coalition's value get zero.
  for (int i = 0; i < n; ++i) {
    if (!detail::is_dummy(game, i, detection_eps)) continue;
    ++rep.dummy_players;
    rep.dummy_residual = std::max(
        rep.dummy_residual, std::abs(attr.phi[static_cast<std::size_t>(i)]));
  }
  rep.dummy_ok = rep.dummy_residual <= tolerance;

  // Additivity: phi(g + h) = phi(g) + phi(h), componentwise.
  const CoalitionGame& g = add_g ? *add_g : game;
  const CoalitionGame& h = add_h ? *add_h : game;
  if (g.n_features() != n || h.n_features() != n) {
    throw usage_error("additivity pair must match the game size");
  }
  const CoalitionGame gh = sum_game(g, h);
  const Attribution phi_g = exact_shapley_subset(g);
  const Attribution phi_h = exact_shapley_subset(h);
  const Attribution phi_gh = exact_shapley_subset(gh);
  for (int r = 0; r < n; ++r) {
    const auto k = static_cast<std::size_t>(r);
    rep.additivity_residual =
        std::max(rep.additivity_residual,
                 std::abs(phi_gh.phi[k] - phi_g.phi[k] - phi_h.phi[k]));
  }
  rep.additivity_ok = rep.additivity_residual <= tolerance;

  return rep;
}

}  // namespace svex

#endif  // SVEX_AXIOMS_HPP
