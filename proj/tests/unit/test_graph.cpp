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

#include "svex/graph.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "svex/rng.hpp"

using svex::BackgroundDataset;
using svex::BinaryAdjacency;
using svex::FeatureGraph;

namespace {

// Independent sample correlation, written the textbook way.
double sample_correlation(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
    sxy += xs[i] * ys[i];
  }
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  return cov / std::sqrt(vx * vy);
}

FeatureGraph three_node_example() {
  // weights {01:0.9, 02:0.1, 12:0.2}; mean off-diagonal = 0.4.
  FeatureGraph g(3);
  g.set_weight(0, 1, 0.9);
  g.set_weight(0, 2, 0.1);
  g.set_weight(1, 2, 0.2);
  return g;
}

}  // namespace

TEST_CASE("correlation of identical and negated columns") {
  BackgroundDataset ds;
  ds.feature_names = {"a", "b", "c"};
  for (double v : {1.0, 2.0, 5.0, -3.0}) {
    ds.instances.push_back({v, v, -v});
  }
  const FeatureGraph g = svex::correlation_graph(ds);
  REQUIRE(g.weight(0, 1) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(g.weight(0, 2) == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(g.weight(1, 2) == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(g.weight(0, 0) == 1.0);
}

TEST_CASE("planted correlation is recovered from 10k rows") {
  svex::Rng rng(99);
  BackgroundDataset ds;
  ds.feature_names = {"f0", "f1", "f2", "f3", "f4"};
  const double rho = 0.8;
  for (int i = 0; i < 10000; ++i) {
    const double z = rng.next_normal();
    const double w = rng.next_normal();
    ds.instances.push_back({z, rho * z + std::sqrt(1 - rho * rho) * w,
                            rng.next_normal(), rng.next_normal(),
                            rng.next_normal()});
  }
  const FeatureGraph g = svex::correlation_graph(ds);
  REQUIRE(std::abs(g.weight(0, 1) - rho) <= 0.02);

  // The graph builder must agree with an independent correlation oracle.
  std::vector<double> c0, c1;
  for (const auto& row : ds.instances) {
    c0.push_back(row[0]);
    c1.push_back(row[1]);
  }
  REQUIRE(g.weight(0, 1) == Catch::Approx(sample_correlation(c0, c1)).margin(1e-12));
}

TEST_CASE("zero-variance column gets zero weights and a warning") {
  BackgroundDataset ds;
  ds.feature_names = {"a", "const"};
  ds.instances = {{1.0, 3.0}, {2.0, 3.0}, {4.0, 3.0}};
  std::vector<std::string> warnings;
  const FeatureGraph g = svex::correlation_graph(ds, &warnings);
  REQUIRE(g.weight(0, 1) == 0.0);
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("distance graph follows exp(-d/2)") {
  const FeatureGraph g =
      svex::distance_graph({{0.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}});
  REQUIRE(g.weight(0, 1) == 1.0);  // coincident centroids
  REQUIRE(g.weight(0, 2) == Catch::Approx(std::exp(-1.0)).margin(1e-15));

  // Three collinear centroids at unit spacing vs an elementwise oracle.
  const FeatureGraph line = svex::distance_graph({{0.0}, {1.0}, {2.0}});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double d = std::abs(i - j);
      REQUIRE(line.weight(i, j) ==
              Catch::Approx(i == j ? 1.0 : std::exp(-d / 2.0)).margin(1e-15));
    }
  }
}

TEST_CASE("binarize uses a strict comparison against the mean") {
  FeatureGraph uniform(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) uniform.set_weight(i, j, 0.7);
  const BinaryAdjacency adj = svex::binarize(uniform);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) REQUIRE(!adj.edge(i, j));
}

TEST_CASE("binarize against the mean keeps only strong edges") {
  const FeatureGraph g = three_node_example();
  REQUIRE(g.mean_off_diagonal() == Catch::Approx(0.4).margin(1e-15));
  const BinaryAdjacency adj = svex::binarize(g);
  REQUIRE(adj.edge(0, 1));
  REQUIRE(!adj.edge(0, 2));
  REQUIRE(!adj.edge(1, 2));
  REQUIRE(adj.threshold_used() == Catch::Approx(0.4).margin(1e-15));
}

TEST_CASE("threshold of -inf yields the complete graph") {
  const FeatureGraph g = three_node_example();
  const BinaryAdjacency adj =
      svex::binarize(g, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) REQUIRE(adj.edge(i, j));
}

TEST_CASE("re-binarizing with the recorded threshold is idempotent") {
  svex::Rng rng(5);
  FeatureGraph g(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) g.set_weight(i, j, rng.next_double());
  const BinaryAdjacency a = svex::binarize(g);
  const BinaryAdjacency b = svex::binarize(g, a.threshold_used());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) REQUIRE(a.edge(i, j) == b.edge(i, j));
}

TEST_CASE("neighborhood always contains its center") {
  const FeatureGraph g = three_node_example();
  const BinaryAdjacency adj = svex::binarize(g);
  REQUIRE(svex::neighborhood(adj, 0).members() == std::vector<int>{0, 1});
  REQUIRE(svex::neighborhood(adj, 2).members() == std::vector<int>{2});

  const BinaryAdjacency complete = BinaryAdjacency::complete(5);
  REQUIRE(svex::neighborhood(complete, 3).count() == 5);
  const BinaryAdjacency empty = BinaryAdjacency::edgeless(5);
  REQUIRE(svex::neighborhood(empty, 3).members() == std::vector<int>{3});

  REQUIRE_THROWS_AS(svex::neighborhood(adj, 3), svex::Error);
}

TEST_CASE("neighborhood membership is symmetric") {
  svex::Rng rng(11);
  FeatureGraph g(8);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) g.set_weight(i, j, rng.next_double());
  const BinaryAdjacency adj = svex::binarize(g);
  for (int i = 0; i < 8; ++i) {
    const auto ni = svex::neighborhood(adj, i);
    for (int j = 0; j < 8; ++j) {
      if (i == j) continue;
      const auto nj = svex::neighborhood(adj, j);
      REQUIRE(ni.contains(j) == nj.contains(i));
    }
  }
}

TEST_CASE("averaging graphs is an element-wise mean") {
  FeatureGraph a(2), b(2);
  a.set_weight(0, 1, 0.2);
  b.set_weight(0, 1, 0.8);
  const FeatureGraph avg = svex::average_graphs({a, b});
  REQUIRE(avg.weight(0, 1) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("weight matrix round-trips through CSV") {
  const FeatureGraph g = three_node_example();
  std::ostringstream out;
  svex::write_weight_matrix(out, g);
  std::istringstream in(out.str());
  const FeatureGraph back = svex::read_weight_matrix(in, "test");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(back.weight(i, j) == g.weight(i, j));
}

TEST_CASE("malformed matrices are rejected with coordinates") {
  std::istringstream bad("1,0.5\n0.4,1\n");
  REQUIRE_THROWS_WITH(svex::read_weight_matrix(bad, "m"),
                      Catch::Matchers::ContainsSubstring("symmetric"));
  std::istringstream junk("1,x\n0.4,1\n");
  REQUIRE_THROWS_WITH(svex::read_weight_matrix(junk, "m"),
                      Catch::Matchers::ContainsSubstring("row 1, column 2"));
  std::istringstream ragged("1,0,0\n0,1\n");
  REQUIRE_THROWS_AS(svex::read_weight_matrix(ragged, "m"), svex::Error);
}
