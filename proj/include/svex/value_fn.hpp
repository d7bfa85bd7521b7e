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

#ifndef SVEX_VALUE_FN_HPP
#define SVEX_VALUE_FN_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/game.hpp"
#include "svex/instance.hpp"
#include "svex/numeric.hpp"
#include "svex/oracle.hpp"
#include "svex/rng.hpp"

namespace svex {

// Everything needed to turn a classifier into a cooperative game for one
// target instance.
struct GameConfig {
  Instance target;
  BackgroundDataset background;
  // Background draws per marginalization; nullopt means exhaustive (every
  // background instance). Draws are without replacement while the count
  // fits in the background, with replacement beyond.
  std::optional<std::size_t> marginal_samples;
  double log_base = 2.0;
  double prob_floor = 1e-12;
  // When set, scores are computed inside this community: the reference
  // conditional keeps only these features and coalitions live inside it.
  std::optional<FeatureSet> restrict_to;
  std::uint64_t seed = 0;
  std::size_t batch_size = 256;

  int n_features() const { return static_cast<int>(target.size()); }

  void validate() const {
    check_finite(target, "target instance");
    background.validate();
    if (background.width() != n_features()) {
      throw usage_error("background width " + std::to_string(background.width()) +
                        " does not match target width " +
                        std::to_string(n_features()));
    }
    if (marginal_samples && *marginal_samples == 0) {
      throw usage_error("marginal_samples must be positive (or unset for "
                        "exhaustive marginalization)");
    }
    if (!(prob_floor > 0.0) || !(prob_floor < 0.5)) {
      throw usage_error("prob_floor must lie in (0, 0.5)");
    }
    if (!(log_base > 0.0) || log_base == 1.0) {
      throw usage_error("log_base must be positive and different from 1");
    }
    if (restrict_to && restrict_to->universe() != n_features()) {
      throw usage_error("restrict_to universe does not match the target width");
    }
  }
};

// Splice of target and background: keeps `keep` from x, takes the rest
// from x_hat.
inline Instance compose(const Instance& x, const Instance& x_hat,
                        const FeatureSet& keep) {
  if (x.size() != x_hat.size()) {
    throw usage_error("compose: instances have different widths (" +
                      std::to_string(x.size()) + " vs " +
                      std::to_string(x_hat.size()) + ")");
  }
  if (keep.universe() != static_cast<int>(x.size())) {
    throw usage_error("compose: keep set universe does not match the width");
  }
  Instance z(x_hat);
  for (int i : keep.members()) z[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  return z;
}

namespace detail {

// Background row indices for one marginalization, ascending. The draw is a
// pure function of (seed, corrupted), so evaluation order and thread count
// cannot change it; ascending order makes a full-size draw coincide with
// exhaustive enumeration.
inline std::vector<std::size_t> marginal_draws(const GameConfig& cfg,
                                               const FeatureSet& corrupted) {
  const std::size_t population = cfg.background.size();
  if (!cfg.marginal_samples) {
    std::vector<std::size_t> all(population);
    for (std::size_t i = 0; i < population; ++i) all[i] = i;
    return all;
  }
  const std::size_t m = *cfg.marginal_samples;
  Rng rng(derive_key(cfg.seed, static_cast<std::uint64_t>(corrupted.hash())));
  if (m <= population) {
    return rng.sample_without_replacement(population, m);
  }
  std::vector<std::size_t> draws(m);
  for (auto& d : draws) d = static_cast<std::size_t>(rng.bounded(population));
  std::sort(draws.begin(), draws.end());
  return draws;
}

}  // namespace detail

// p(. | target with `corrupted` marginalized out): the mean over background
// draws of the oracle's output on the spliced instance. With nothing
// corrupted this is exactly the oracle at the target.
inline std::vector<double> marginal_prediction(const PredictionOracle& oracle,
                                               const GameConfig& cfg,
                                               const FeatureSet& corrupted) {
  if (corrupted.universe() != cfg.n_features()) {
    throw usage_error("corrupted set universe does not match the target width");
  }
  if (corrupted.empty()) return oracle.predict(cfg.target);

  const FeatureSet keep = corrupted.complement();
  const auto draws = detail::marginal_draws(cfg, corrupted);
  std::vector<Instance> composed;
  composed.reserve(draws.size());
  for (std::size_t d : draws) {
    composed.push_back(compose(cfg.target, cfg.background.instances[d], keep));
  }
  const auto probs = oracle_eval(oracle, composed, cfg.batch_size);

  std::vector<double> mean(static_cast<std::size_t>(oracle.n_classes()), 0.0);
  for (const auto& row : probs) {
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  for (auto& v : mean) v /= static_cast<double>(probs.size());
  return mean;
}

namespace detail {

// Expected log-probability gap between a reference conditional and a
// corrupted conditional, under the reference distribution. Both conditionals
// are clamped into [prob_floor, 1] before the logs, so saturated classifiers
// (hard 0/1 outputs) stay finite.
inline double log_gap_score(const std::vector<double>& reference,
                            const std::vector<double>& corrupted,
                            double prob_floor, double log_base) {
  const double ln_base = std::log(log_base);
  double acc = 0.0;
  for (std::size_t y = 0; y < reference.size(); ++y) {
    const double w = reference[y];
    if (w == 0.0) continue;  // 0 * log(anything clamped) is 0
    acc += w * (std::log(clamp_prob(reference[y], prob_floor)) -
                std::log(clamp_prob(corrupted[y], prob_floor)));
  }
  return acc / ln_base;
}

}  // namespace detail

// A classifier plus a target instance, viewed as a cooperative game.
// Copies share the underlying configuration and cached reference.
class OracleGame {
 public:
  OracleGame(OraclePtr oracle, GameConfig cfg)
      : oracle_(std::move(oracle)),
        cfg_(std::make_shared<const GameConfig>(std::move(cfg))) {
    if (!oracle_) throw usage_error("oracle is null");
    cfg_->validate();
    if (oracle_->n_features() != cfg_->n_features()) {
      throw usage_error("oracle expects " + std::to_string(oracle_->n_features()) +
                        " features but the target has " +
                        std::to_string(cfg_->n_features()));
    }
    reference_ = compute_reference();
  }

  int n_features() const { return cfg_->n_features(); }
  const GameConfig& config() const { return *cfg_; }
  const PredictionOracle& oracle() const { return *oracle_; }
  OraclePtr oracle_ptr() const { return oracle_; }

  // The conditional every score is anchored to: the oracle at the full
  // target, or the community-restricted marginal when restrict_to is set.
  const std::vector<double>& reference() const { return reference_; }

  // Importance of coalition s: how much predictive log-mass is lost when s
  // is corrupted. Zero for the empty set by construction.
  double importance(const FeatureSet& s) const {
    check_coalition(s);
    if (s.empty()) return 0.0;
    const auto corrupted_probs =
        marginal_prediction(*oracle_, *cfg_, corrupted_set_for(s));
    return detail::log_gap_score(reference_, corrupted_probs, cfg_->prob_floor,
                                 cfg_->log_base);
  }

  // The memoized cooperative game over this value function. The returned
  // game shares this object's configuration; its value_calls counter counts
  // characteristic-function evaluations.
  CoalitionGame as_game() const {
    OracleGame copy = *this;
    return CoalitionGame(n_features(), [copy](const FeatureSet& s) {
      return copy.importance(s);
    });
  }

  // Same game, restricted to a community.
  OracleGame restricted(const FeatureSet& community) const {
    GameConfig cfg = *cfg_;
    cfg.restrict_to = community;
    return OracleGame(oracle_, std::move(cfg));
  }

  // ---- single-draw pieces for the Monte Carlo estimator --------------------
  // One MC iteration scores coalitions against a single background instance
  // instead of the full marginalization. The estimator assembles batches of
  // these composed instances, evaluates them through the oracle in one go,
  // and scores the log gaps afterwards.

  // The instance the classifier sees when coalition s is corrupted with
  // background row bg_index.
  Instance corrupted_view(const FeatureSet& s, std::size_t bg_index) const {
    check_coalition(s);
    return compose(cfg_->target, cfg_->background.instances[bg_index],
                   corrupted_set_for(s).complement());
  }

  // The single-draw reference view (only meaningful when restricted;
  // otherwise the cached exact reference is used).
  Instance reference_view(std::size_t bg_index) const {
    return compose(cfg_->target, cfg_->background.instances[bg_index],
                   *cfg_->restrict_to);
  }

  bool has_restriction() const { return cfg_->restrict_to.has_value(); }

  double score_against(const std::vector<double>& reference_probs,
                       const std::vector<double>& corrupted_probs) const {
    return detail::log_gap_score(reference_probs, corrupted_probs,
                                 cfg_->prob_floor, cfg_->log_base);
  }

 private:
  void check_coalition(const FeatureSet& s) const {
    if (s.universe() != n_features()) {
      throw usage_error("coalition universe does not match the game width");
    }
    if (cfg_->restrict_to && !s.is_subset_of(*cfg_->restrict_to)) {
      throw usage_error("coalition " + s.to_string() +
                        " is not inside the configured community " +
                        cfg_->restrict_to->to_string());
    }
  }

  // The full set the marginalization corrupts for coalition s: s itself,
  // plus everything outside the community when restricted.
  FeatureSet corrupted_set_for(const FeatureSet& s) const {
    if (!cfg_->restrict_to) return s;
    return cfg_->restrict_to->complement().set_union(s);
  }

  std::vector<double> compute_reference() const {
    if (!cfg_->restrict_to) return oracle_->predict(cfg_->target);
    return marginal_prediction(*oracle_, *cfg_,
                               cfg_->restrict_to->complement());
  }

  OraclePtr oracle_;
  std::shared_ptr<const GameConfig> cfg_;
  std::vector<double> reference_;
};

// Importance score as a free function, matching the game-construction path.
inline double importance_score(OraclePtr oracle, const GameConfig& cfg,
                               const FeatureSet& s) {
  return OracleGame(std::move(oracle), cfg).importance(s);
}

inline CoalitionGame as_game(OraclePtr oracle, GameConfig cfg) {
  return OracleGame(std::move(oracle), std::move(cfg)).as_game();
}

}  // namespace svex

#endif  // SVEX_VALUE_FN_HPP
