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

#ifndef SVEX_FIXTURES_HPP
#define SVEX_FIXTURES_HPP

#include <cmath>
#include <cstdint>

#include "svex/feature_set.hpp"
#include "svex/game.hpp"
#include "svex/rng.hpp"

// Canonical small instances used by the validation suite and the tests.
// The or-gate game is the two-feature worked example that anchors the whole
// engine: v({}) = v({0}) = v({1}) = 0 and v({0,1}) = log2(4/3), so each
// feature's exact share is log2(4/3)/2 ~ 0.20752.

namespace svex::fixtures {

inline constexpr double kOrGateTotal = 0.4150374992788438;  // log2(4/3)
inline constexpr double kOrGatePhi = kOrGateTotal / 2.0;

inline CoalitionGame or_gate_game() {
  return CoalitionGame(2, [](const FeatureSet& s) {
    return s.count() == 2 ? std::log2(4.0 / 3.0) : 0.0;
  });
}

// v(S) i.i.d. uniform on [0,1) keyed by (seed, S); v(empty) = 0. Pure and
// reproducible, so games can be reconstructed from their seed alone.
inline CoalitionGame random_uniform_game(int n, std::uint64_t seed) {
  return CoalitionGame(n, [seed](const FeatureSet& s) {
    const std::uint64_t key =
        derive_key(seed, static_cast<std::uint64_t>(s.hash()));
    return static_cast<double>(key >> 11) * 0x1.0p-53;
  });
}

// As above but with feature `dummy` contributing nothing to any coalition.
inline CoalitionGame random_game_with_dummy(int n, std::uint64_t seed,
                                            int dummy) {
  return CoalitionGame(n, [seed, dummy](const FeatureSet& s) {
    FeatureSet stripped = s.without(dummy);
    if (stripped.empty()) return 0.0;
    const std::uint64_t key =
        derive_key(seed, static_cast<std::uint64_t>(stripped.hash()));
    return static_cast<double>(key >> 11) * 0x1.0p-53;
  });
}

}  // namespace svex::fixtures

#endif  // SVEX_FIXTURES_HPP
