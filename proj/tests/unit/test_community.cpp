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

#include "svex/community.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <functional>
#include <sstream>
#include <vector>

#include "svex/rng.hpp"

using svex::CommunityPartition;
using svex::FeatureGraph;

namespace {

// Two disjoint 5-cliques on nodes {0..4} and {5..9}, unit weights.
FeatureGraph two_cliques() {
  FeatureGraph g(10);
  for (int base : {0, 5})
    for (int i = base; i < base + 5; ++i)
      for (int j = i + 1; j < base + 5; ++j) g.set_weight(i, j, 1.0);
  return g;
}

// Enumerate set partitions of n elements via restricted growth strings,
// optionally capped at max_blocks blocks.
void for_each_partition(int n, int max_blocks,
                        const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      fn(labels);
      return;
    }
    const int limit = std::min(used + 1, max_blocks);
    for (int b = 0; b < limit; ++b) {
      labels[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
}

// Independent modularity computation: straight double sum over node pairs.
double modularity_oracle(const FeatureGraph& g, const std::vector<int>& labels) {
  const int n = g.n();
  double total = 0.0;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = std::max(g.weight(i, j), 0.0);
      total += w;
      degree[static_cast<std::size_t>(i)] += w;
    }
  if (total == 0.0) return 0.0;
  double q = 0.0;
  const int blocks = 1 + *std::max_element(labels.begin(), labels.end());
  for (int c = 0; c < blocks; ++c) {
    double internal = 0.0, deg = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != c) continue;
      deg += degree[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        if (i != j && labels[static_cast<std::size_t>(j)] == c)
          internal += std::max(g.weight(i, j), 0.0);
      }
    }
    q += internal / total - (deg / total) * (deg / total);
  }
  return q;
}

}  // namespace

TEST_CASE("two disjoint cliques are recovered exactly") {
  const FeatureGraph g = two_cliques();
  const auto res = svex::detect_communities(g);
  REQUIRE(res.partition.community_count() == 2);
  REQUIRE(res.partition.communities[0].members() ==
          std::vector<int>{0, 1, 2, 3, 4});
  REQUIRE(res.partition.communities[1].members() ==
          std::vector<int>{5, 6, 7, 8, 9});
  REQUIRE(res.modularity == Catch::Approx(0.5).margin(1e-12));

  // Brute force over all partitions with <= 3 blocks: nothing beats the
  // two-clique split, and greedy found that optimum.
  double best = -1.0;
  for_each_partition(10, 3, [&](const std::vector<int>& labels) {
    best = std::max(best, modularity_oracle(g, labels));
  });
  REQUIRE(res.modularity == Catch::Approx(best).margin(1e-12));
}

TEST_CASE("single node is one community") {
  FeatureGraph g(1);
  const auto res = svex::detect_communities(g);
  REQUIRE(res.partition.community_count() == 1);
  REQUIRE(res.partition.communities[0].members() == std::vector<int>{0});
}

TEST_CASE("complete uniform graph stays one community") {
  FeatureGraph k6(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) k6.set_weight(i, j, 1.0);
  const auto res = svex::detect_communities(k6);
  REQUIRE(res.partition.community_count() == 1);

  // Every split of a complete uniform graph scores at most the trivial
  // partition; verified by full enumeration (Bell(6) = 203 partitions).
  const double trivial = modularity_oracle(k6, std::vector<int>(6, 0));
  for_each_partition(6, 6, [&](const std::vector<int>& labels) {
    REQUIRE(modularity_oracle(k6, labels) <= trivial + 1e-12);
  });
}

TEST_CASE("singleton partition has non-positive modularity") {
  const FeatureGraph g = two_cliques();
  const auto p = CommunityPartition::singletons(10);
  const double q = svex::modularity(g, p);
  REQUIRE(q <= 0.0);
  REQUIRE(q == Catch::Approx(modularity_oracle(
                   g, std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}))
                   .margin(1e-12));
}

TEST_CASE("greedy beats random partitions on the two-clique graph") {
  const FeatureGraph g = two_cliques();
  const auto res = svex::detect_communities(g);
  svex::Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> labels(10);
    for (auto& l : labels) l = static_cast<int>(rng.bounded(3));
    REQUIRE(modularity_oracle(g, labels) <= res.modularity + 1e-12);
  }
}

TEST_CASE("greedy result beats 1000 random partitions on small graphs") {
  svex::Rng rng(77);
  for (int n : {5, 8}) {
    FeatureGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        g.set_weight(i, j, rng.next_double() < 0.5 ? rng.next_double() : 0.0);
    const auto res = svex::detect_communities(g);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<int> labels(static_cast<std::size_t>(n));
      for (auto& l : labels) l = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
      REQUIRE(modularity_oracle(g, labels) <= res.modularity + 1e-12);
    }
  }
}

TEST_CASE("every greedy merge strictly increases modularity") {
  svex::Rng rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng.bounded(27));  // up to 30
    FeatureGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        g.set_weight(i, j, rng.next_double() < 0.4 ? rng.next_double() : 0.0);
    const auto res = svex::detect_communities(g, /*record_trace=*/true);
    REQUIRE(res.q_trace.size() == res.label_trace.size());
    for (std::size_t step = 1; step < res.q_trace.size(); ++step) {
      REQUIRE(res.q_trace[step] > res.q_trace[step - 1]);
      // Cross-check the incremental Q against the from-scratch oracle.
      REQUIRE(res.q_trace[step] ==
              Catch::Approx(modularity_oracle(g, res.label_trace[step]))
                  .margin(1e-9));
    }
    res.partition.validate(n);
  }
}

TEST_CASE("graph with no positive edges falls back to singletons") {
  FeatureGraph g(4);
  g.set_weight(0, 1, -0.5);
  const auto res = svex::detect_communities(g);
  REQUIRE(res.degenerate);
  REQUIRE(!res.warnings.empty());
  REQUIRE(res.partition.community_count() == 4);
}

TEST_CASE("partition invariants are validated") {
  const auto p = CommunityPartition::from_labels({0, 0, 1, 1, 0});
  p.validate(5);
  REQUIRE(p.community_count() == 2);
  REQUIRE_THROWS_AS(p.validate(6), svex::Error);
  const FeatureGraph g = two_cliques();
  REQUIRE_THROWS_AS(svex::modularity(g, p), svex::Error);
}

TEST_CASE("partition round-trips through CSV") {
  const auto p = CommunityPartition::from_labels({0, 1, 1, 0, 2});
  std::ostringstream out;
  svex::write_partition(out, p);
  std::istringstream in(out.str());
  const auto back = svex::read_partition(in, "test");
  REQUIRE(back.labels == p.labels);
}
