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

#ifndef SVEX_EXPLAIN_HPP
#define SVEX_EXPLAIN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svex/community.hpp"
#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/game.hpp"
#include "svex/graph.hpp"
#include "svex/numeric.hpp"
#include "svex/parallel.hpp"
#include "svex/rng.hpp"
#include "svex/shapley.hpp"
#include "svex/value_fn.hpp"

namespace svex {

enum class ExplainMethod { full, csve, hsve, single };

inline const char* explain_method_name(ExplainMethod m) {
  switch (m) {
    case ExplainMethod::full: return "full";
    case ExplainMethod::csve: return "csve";
    case ExplainMethod::hsve: return "hsve";
    case ExplainMethod::single: return "single";
  }
  return "?";
}

inline std::optional<ExplainMethod> explain_method_from_name(
    const std::string& s) {
  for (ExplainMethod m : {ExplainMethod::full, ExplainMethod::csve,
                          ExplainMethod::hsve, ExplainMethod::single}) {
    if (s == explain_method_name(m)) return m;
  }
  return std::nullopt;
}

// Tuning shared by every attribution path.
struct ExplainOptions {
  std::uint64_t mc_samples = 1000;  // m, per feature
  int exact_cutoff = 12;            // enumerate contexts up to 2^cutoff values
  std::uint64_t seed = 0;
  int threads = 1;
  bool allow_mc = true;

  void validate() const {
    if (mc_samples == 0) throw usage_error("mc_samples must be positive");
    if (exact_cutoff < 0 || exact_cutoff > kDefaultExactLimit) {
      throw usage_error("exact_cutoff must lie in [0, " +
                        std::to_string(kDefaultExactLimit) + "]");
    }
    if (threads < 1) throw usage_error("threads must be >= 1");
  }

  // Exact enumeration wins whenever the full 2^|context| sweep costs no
  // more than a few Monte Carlo budgets; otherwise sample.
  bool use_exact(int context_size) const {
    if (context_size > 62) return false;
    const std::uint64_t exhaustive = 1ULL << context_size;
    const std::uint64_t budget =
        std::max(1ULL << exact_cutoff, 4 * mc_samples);
    return exhaustive <= budget;
  }

  void require_mc(int context_size) const {
    if (!allow_mc) {
      throw usage_error("context of " + std::to_string(context_size) +
                        " features needs the Monte Carlo estimator, which is "
                        "disabled");
    }
  }
};

// One explanation request, dispatched by method.
struct ExplainRequest {
  ExplainMethod method = ExplainMethod::full;
  std::optional<BinaryAdjacency> adjacency;     // csve
  std::optional<CommunityPartition> partition;  // hsve
  std::uint64_t mc_samples = 1000;
  int exact_cutoff = 12;
  std::uint64_t seed = 0;
  int threads = 1;
  bool allow_mc = true;
  std::optional<FeatureSet> features;  // explain only these (default: all)

  ExplainOptions options() const {
    return ExplainOptions{mc_samples, exact_cutoff, seed, threads, allow_mc};
  }
};

// ---- Monte Carlo estimator -------------------------------------------------

namespace detail {

// Permutation and predecessor set for one MC iteration. The draw is keyed
// by (seed, feature, iteration): reproducible and order-independent.
struct McDraw {
  FeatureSet before;       // predecessors of r in the sampled order
  std::uint64_t bg_index;  // background row for the fused single-draw value
};

inline McDraw mc_draw(const FeatureSet& context, int r, std::uint64_t seed,
                      std::uint64_t iteration, std::uint64_t background_size) {
  Rng rng(derive_key(seed, static_cast<std::uint64_t>(r), iteration));
  std::vector<int> order = context.members();
  rng.shuffle(order);
  McDraw draw{FeatureSet(context.universe()), 0};
  for (int member : order) {
    if (member == r) break;
    draw.before.insert(member);
  }
  draw.bg_index = rng.bounded(background_size);
  return draw;
}

}  // namespace detail

// Permutation-sampling estimate of feature r's Shapley value inside
// `context`: the average over m sampled orders of v(Pre u {r}) - v(Pre).
// Values come from the game itself, so this is the plain unbiased
// permutation estimator for the context-restricted Shapley value.
inline double mc_shapley(const CoalitionGame& game, const FeatureSet& context,
                         int r, std::uint64_t m, std::uint64_t seed,
                         int threads = 1) {
  if (m == 0) throw usage_error("mc_shapley needs at least one sample");
  if (context.empty()) throw usage_error("mc_shapley needs a non-empty context");
  if (!context.contains(r)) {
    throw usage_error("feature " + std::to_string(r) + " is not in context " +
                      context.to_string());
  }
  std::vector<double> deltas(m, 0.0);
  parallel_for(m, threads, [&](std::size_t j) {
    const auto draw = detail::mc_draw(context, r, seed, j, 1);
    deltas[j] =
        game.value(draw.before.with(r)) - game.value(draw.before);
  });
  return mean_of(deltas);
}

// Oracle-backed variant: each iteration draws one background instance and
// scores both coalitions against that single draw (marginalization fused
// into the permutation sample). Composed instances are accumulated and
// flushed through the oracle in batches.
inline double mc_shapley(const OracleGame& og, const FeatureSet& context,
                         int r, std::uint64_t m, std::uint64_t seed,
                         int threads = 1,
                         std::uint64_t* value_evals = nullptr) {
  if (m == 0) throw usage_error("mc_shapley needs at least one sample");
  if (context.empty()) throw usage_error("mc_shapley needs a non-empty context");
  if (!context.contains(r)) {
    throw usage_error("feature " + std::to_string(r) + " is not in context " +
                      context.to_string());
  }
  (void)threads;  // batching dominates; per-feature callers parallelize

  const std::uint64_t bg_size = og.config().background.size();
  const bool restricted = og.has_restriction();
  const std::size_t rows_per_iter = restricted ? 3 : 2;
  constexpr std::uint64_t kBlock = 8192;

  std::vector<double> deltas(m, 0.0);
  for (std::uint64_t start = 0; start < m; start += kBlock) {
    const std::uint64_t end = std::min(m, start + kBlock);
    std::vector<Instance> batch;
    batch.reserve(static_cast<std::size_t>(end - start) * rows_per_iter);
    for (std::uint64_t j = start; j < end; ++j) {
      const auto draw = detail::mc_draw(context, r, seed, j, bg_size);
      batch.push_back(og.corrupted_view(draw.before.with(r), draw.bg_index));
      batch.push_back(og.corrupted_view(draw.before, draw.bg_index));
      if (restricted) batch.push_back(og.reference_view(draw.bg_index));
    }
    const auto probs =
        oracle_eval(og.oracle(), batch, og.config().batch_size);
    for (std::uint64_t j = start; j < end; ++j) {
      const std::size_t base = static_cast<std::size_t>(j - start) * rows_per_iter;
      const std::vector<double>& ref =
          restricted ? probs[base + 2] : og.reference();
      const double v1 = og.score_against(ref, probs[base]);
      const double v2 = og.score_against(ref, probs[base + 1]);
      deltas[j] = v1 - v2;
    }
  }
  if (value_evals) *value_evals += 2 * m;
  return mean_of(deltas);
}

// ---- exact/MC hybrid per-feature engine -------------------------------------

namespace detail {

// One feature's Shapley value inside a context, enumerated exactly when the
// context is small enough and sampled otherwise. `shared` memoizes
// coalition values across features; `og` (optional) provides the fused
// single-draw MC path for oracle-backed games. `used_mc`, when given, is a
// per-feature slot so parallel callers stay race-free.
inline double context_shapley(const CoalitionGame& shared,
                              const OracleGame* og, const FeatureSet& context,
                              int r, const ExplainOptions& opts,
                              std::uint8_t* used_mc = nullptr) {
  if (opts.use_exact(context.count())) {
    if (used_mc) *used_mc = 0;
    return restricted_exact_shapley(
        [&shared](const FeatureSet& s) { return shared.value(s); }, context, r);
  }
  opts.require_mc(context.count());
  if (used_mc) *used_mc = 1;
  if (og != nullptr) {
    return mc_shapley(*og, context, r, opts.mc_samples,
                      derive_key(opts.seed, 0x6d63ULL),  // "mc" lane
                      opts.threads);
  }
  return mc_shapley(shared, context, r, opts.mc_samples,
                    derive_key(opts.seed, 0x6d63ULL), opts.threads);
}

inline std::vector<int> requested_features(
    int n, const std::optional<FeatureSet>& features) {
  if (!features) return FeatureSet::all(n).members();
  if (features->universe() != n) {
    throw usage_error("requested feature set universe does not match the game");
  }
  if (features->empty()) throw usage_error("requested feature set is empty");
  return features->members();
}

inline void mark_computed(Attribution& attr, int n,
                          const std::vector<int>& features) {
  if (static_cast<int>(features.size()) == n) return;  // all computed
  attr.computed.assign(static_cast<std::size_t>(n), false);
  for (int r : features) attr.computed[static_cast<std::size_t>(r)] = true;
}

inline std::size_t count_mc(const std::vector<std::uint8_t>& flags) {
  std::size_t c = 0;
  for (auto f : flags) c += f;
  return c;
}

}  // namespace detail

// ---- full SVE ---------------------------------------------------------------

// Exact Shapley values of the induced game when 2^N fits the budget,
// otherwise the MC estimator per feature with the full set as context.
inline Attribution full_sve(const CoalitionGame& game,
                            const ExplainOptions& opts = {},
                            const std::optional<FeatureSet>& features = std::nullopt,
                            const OracleGame* og = nullptr) {
  opts.validate();
  const int n = game.n_features();
  const auto wanted = detail::requested_features(n, features);

  Attribution out;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  out.seed = opts.seed;

  if (opts.use_exact(n) && static_cast<int>(wanted.size()) == n) {
    Attribution exact = exact_shapley_subset(game, n);
    out.phi = std::move(exact.phi);
    out.method = Method::Exact;
    out.value_calls = game.value_calls();
    return out;
  }

  std::vector<std::uint8_t> mc_flags(wanted.size(), 0);
  const FeatureSet full = game.full_set();
  parallel_for(wanted.size(), opts.threads, [&](std::size_t k) {
    const int r = wanted[k];
    out.phi[static_cast<std::size_t>(r)] =
        detail::context_shapley(game, og, full, r, opts, &mc_flags[k]);
  });
  const std::size_t mc_features = detail::count_mc(mc_flags);
  out.method = mc_features > 0 ? Method::MonteCarlo : Method::Exact;
  if (mc_features > 0) out.mc_samples = opts.mc_samples;
  out.value_calls = game.value_calls();
  if (og != nullptr) out.value_calls += 2 * opts.mc_samples * mc_features;
  detail::mark_computed(out, n, wanted);
  return out;
}

inline Attribution full_sve(const OracleGame& og, const ExplainOptions& opts = {},
                            const std::optional<FeatureSet>& features = std::nullopt) {
  const CoalitionGame game = og.as_game();
  return full_sve(game, opts, features, &og);
}

// ---- C-SVE ------------------------------------------------------------------

// Neighborhood-restricted Shapley value of one feature: marginal
// contributions are only collected over coalitions inside r's 1-step
// neighborhood (which always includes r).
inline double c_sve(const CoalitionGame& game, const BinaryAdjacency& adjacency,
                    int r, const ExplainOptions& opts = {},
                    const OracleGame* og = nullptr) {
  opts.validate();
  if (adjacency.n() != game.n_features()) {
    throw usage_error("adjacency size " + std::to_string(adjacency.n()) +
                      " does not match the game's " +
                      std::to_string(game.n_features()) + " features");
  }
  const FeatureSet context = neighborhood(adjacency, r);
  return detail::context_shapley(game, og, context, r, opts);
}

inline double c_sve(const OracleGame& og, const BinaryAdjacency& adjacency,
                    int r, const ExplainOptions& opts = {}) {
  const CoalitionGame game = og.as_game();
  return c_sve(game, adjacency, r, opts, &og);
}

// All requested features; coalition values are memoized once and shared
// across features, since neighborhoods overlap.
inline Attribution c_sve_all(const CoalitionGame& game,
                             const BinaryAdjacency& adjacency,
                             const ExplainOptions& opts = {},
                             const std::optional<FeatureSet>& features = std::nullopt,
                             const OracleGame* og = nullptr) {
  opts.validate();
  if (adjacency.n() != game.n_features()) {
    throw usage_error("adjacency size does not match the game");
  }
  const int n = game.n_features();
  const auto wanted = detail::requested_features(n, features);

  Attribution out;
  out.method = Method::CSVE;
  out.seed = opts.seed;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  bool any_mc = false;
  parallel_for(wanted.size(), opts.threads, [&](std::size_t k) {
    const int r = wanted[k];
    bool used_mc = false;
    const FeatureSet context = neighborhood(adjacency, r);
    out.phi[static_cast<std::size_t>(r)] =
        detail::context_shapley(game, og, context, r, opts, &used_mc);
    if (used_mc) any_mc = true;
  });
  if (any_mc) out.mc_samples = opts.mc_samples;
  out.value_calls = game.value_calls();
  detail::mark_computed(out, n, wanted);
  return out;
}

inline Attribution c_sve_all(const OracleGame& og, const BinaryAdjacency& adjacency,
                             const ExplainOptions& opts = {},
                             const std::optional<FeatureSet>& features = std::nullopt) {
  const CoalitionGame game = og.as_game();
  return c_sve_all(game, adjacency, opts, features, &og);
}

// ---- H-SVE ------------------------------------------------------------------

// Community-restricted attribution. For each community the factory induces
// a restricted game; features are scored by exact Shapley inside their
// community (or MC above the cutoff) and assembled into one vector, which
// stays comparable across communities.
inline Attribution h_sve_with_factory(
    const std::function<CoalitionGame(const FeatureSet&)>& factory,
    int n_features, const CommunityPartition& partition,
    const ExplainOptions& opts = {},
    const std::optional<FeatureSet>& features = std::nullopt,
    const OracleGame* og = nullptr) {
  opts.validate();
  partition.validate(n_features);
  const auto wanted = detail::requested_features(n_features, features);

  Attribution out;
  out.method = Method::HSVE;
  out.seed = opts.seed;
  out.phi.assign(static_cast<std::size_t>(n_features), 0.0);

  bool any_mc = false;
  std::uint64_t calls = 0;
  for (const FeatureSet& community : partition.communities) {
    std::vector<int> members;
    for (int r : community.members()) {
      for (int w : wanted) {
        if (w == r) { members.push_back(r); break; }
      }
    }
    if (members.empty()) continue;

    if (community.count() > 62 && !opts.allow_mc) {
      throw usage_error("community " + community.to_string() +
                        " has more than 62 features; enable the Monte Carlo "
                        "estimator to explain it");
    }

    const CoalitionGame restricted_game = factory(community);
    std::optional<OracleGame> restricted_og;
    if (og != nullptr) restricted_og = og->restricted(community);

    parallel_for(members.size(), opts.threads, [&](std::size_t k) {
      const int r = members[k];
      bool used_mc = false;
      out.phi[static_cast<std::size_t>(r)] = detail::context_shapley(
          restricted_game, restricted_og ? &*restricted_og : nullptr, community,
          r, opts, &used_mc);
      if (used_mc) any_mc = true;
    });
    calls += restricted_game.value_calls();
    if (any_mc && og != nullptr) {
      calls += 2 * opts.mc_samples * members.size();
    }
  }
  if (any_mc) out.mc_samples = opts.mc_samples;
  out.value_calls = calls;
  detail::mark_computed(out, n_features, wanted);
  return out;
}

// Plain games restrict by domain only: the characteristic function is
// unchanged, coalitions just stay inside the community.
inline Attribution h_sve(const CoalitionGame& game,
                         const CommunityPartition& partition,
                         const ExplainOptions& opts = {},
                         const std::optional<FeatureSet>& features = std::nullopt) {
  return h_sve_with_factory(
      [&game](const FeatureSet&) {
        return CoalitionGame(game.n_features(), [&game](const FeatureSet& s) {
          return game.value(s);
        });
      },
      game.n_features(), partition, opts, features);
}

// Oracle-backed games restrict the value function itself: inside community
// A the reference conditional keeps only A, so the restricted game is a
// genuine sub-problem of the classifier.
inline Attribution h_sve(const OracleGame& og, const CommunityPartition& partition,
                         const ExplainOptions& opts = {},
                         const std::optional<FeatureSet>& features = std::nullopt) {
  return h_sve_with_factory(
      [&og](const FeatureSet& community) {
        return og.restricted(community).as_game();
      },
      og.n_features(), partition, opts, features, &og);
}

// ---- single-feature ablation baseline ---------------------------------------

// phi_r = v({r}): the one-at-a-time prediction-difference score. Kept as the
// comparison foil; it misses coalition effects by construction.
inline Attribution single_feature(const CoalitionGame& game,
                                  const ExplainOptions& opts = {},
                                  const std::optional<FeatureSet>& features = std::nullopt) {
  opts.validate();
  const int n = game.n_features();
  const auto wanted = detail::requested_features(n, features);
  Attribution out;
  out.method = Method::Single;
  out.seed = opts.seed;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  parallel_for(wanted.size(), opts.threads, [&](std::size_t k) {
    const int r = wanted[k];
    out.phi[static_cast<std::size_t>(r)] =
        game.value(FeatureSet(n, {r}));
  });
  out.value_calls = game.value_calls();
  detail::mark_computed(out, n, wanted);
  return out;
}

// ---- dispatcher --------------------------------------------------------------

// Routes a request to the right attribution method and stamps the result
// with its provenance.
inline Attribution explain(OraclePtr oracle, GameConfig cfg,
                           const ExplainRequest& req) {
  const ExplainOptions opts = req.options();
  opts.validate();
  cfg.seed = cfg.seed ^ 0;  // keep cfg seed authoritative for marginal draws
  OracleGame og(std::move(oracle), std::move(cfg));

  switch (req.method) {
    case ExplainMethod::full:
      return full_sve(og, opts, req.features);
    case ExplainMethod::csve: {
      if (!req.adjacency) {
        throw usage_error("csve needs an adjacency (--adjacency / --graph)");
      }
      return c_sve_all(og, *req.adjacency, opts, req.features);
    }
    case ExplainMethod::hsve: {
      if (!req.partition) {
        throw usage_error("hsve needs a community partition (--partition)");
      }
      return h_sve(og, *req.partition, opts, req.features);
    }
    case ExplainMethod::single: {
      const CoalitionGame game = og.as_game();
      return single_feature(game, opts, req.features);
    }
  }
  throw usage_error("unknown explain method");
}

}  // namespace svex

#endif  // SVEX_EXPLAIN_HPP
