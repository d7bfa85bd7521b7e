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

#ifndef SVEX_GRAPH_HPP
#define SVEX_GRAPH_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svex/csv.hpp"
#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/instance.hpp"
#include "svex/numeric.hpp"

namespace svex {

// Symmetric feature-affinity graph. The diagonal is stored as 1 by
// convention; it never enters threshold computation and never produces a
// self-edge.
class FeatureGraph {
 public:
  explicit FeatureGraph(int n) : n_(check_n(n)), w_(size_t_n() * size_t_n(), 0.0) {
    for (int i = 0; i < n_; ++i) set_raw(i, i, 1.0);
  }

  static FeatureGraph from_matrix(const std::vector<std::vector<double>>& m) {
    const int n = static_cast<int>(m.size());
    FeatureGraph g(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != n) {
        throw usage_error("weight matrix is not square at row " +
                          std::to_string(i + 1));
      }
      for (int j = 0; j < n; ++j) {
        const double v = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (!std::isfinite(v)) {
          throw usage_error("weight matrix entry (" + std::to_string(i + 1) +
                            "," + std::to_string(j + 1) + ") is not finite");
        }
        if (j < i && v != g.weight(j, i)) {
          throw usage_error("weight matrix is not symmetric at (" +
                            std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ")");
        }
        g.set_raw(i, j, v);
      }
    }
    return g;
  }

  int n() const { return n_; }

  double weight(int i, int j) const {
    check_index(i);
    check_index(j);
    return w_[static_cast<std::size_t>(i) * size_t_n() +
              static_cast<std::size_t>(j)];
  }

  // Sets both (i,j) and (j,i); the matrix stays exactly symmetric.
  void set_weight(int i, int j, double v) {
    check_index(i);
    check_index(j);
    if (!std::isfinite(v)) throw usage_error("edge weight must be finite");
    set_raw(i, j, v);
    set_raw(j, i, v);
  }

  // Mean of the off-diagonal entries: the default binarization threshold.
  double mean_off_diagonal() const {
    if (n_ < 2) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j) acc += weight(i, j);
    return acc / (static_cast<double>(n_) * (n_ - 1));
  }

 private:
  static int check_n(int n) {
    if (n <= 0) throw usage_error("graph needs at least one node");
    return n;
  }
  std::size_t size_t_n() const { return static_cast<std::size_t>(n_); }
  void check_index(int i) const {
    if (i < 0 || i >= n_) {
      throw usage_error("node index " + std::to_string(i) +
                        " out of range for graph of size " + std::to_string(n_));
    }
  }
  void set_raw(int i, int j, double v) {
    w_[static_cast<std::size_t>(i) * size_t_n() + static_cast<std::size_t>(j)] = v;
  }

  int n_;
  std::vector<double> w_;
};

// Thresholded edge structure: bits[i][j] = (weight > threshold), i != j.
class BinaryAdjacency {
 public:
  BinaryAdjacency(int n, double threshold_used)
      : n_(n), threshold_(threshold_used),
        bits_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

  static BinaryAdjacency complete(int n) {
    BinaryAdjacency a(n, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) a.set_edge(i, j);
    return a;
  }

  static BinaryAdjacency edgeless(int n) {
    return BinaryAdjacency(n, std::numeric_limits<double>::infinity());
  }

  int n() const { return n_; }
  double threshold_used() const { return threshold_; }

  bool edge(int i, int j) const {
    check_index(i);
    check_index(j);
    return bits_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(j)] != 0;
  }

  void set_edge(int i, int j) {
    check_index(i);
    check_index(j);
    if (i == j) throw usage_error("self-edges are not representable");
    bits_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
          static_cast<std::size_t>(j)] = 1;
    bits_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) +
          static_cast<std::size_t>(i)] = 1;
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= n_) {
      throw usage_error("node index " + std::to_string(i) +
                        " out of range for adjacency of size " +
                        std::to_string(n_));
    }
  }

  int n_;
  double threshold_;
  std::vector<std::uint8_t> bits_;
};

// Pearson correlation between every pair of feature columns. A constant
// column carries no coalition signal: it gets weight 0 against everything
// and a warning instead of NaN.
inline FeatureGraph correlation_graph(const BackgroundDataset& dataset,
                                      std::vector<std::string>* warnings = nullptr) {
  dataset.validate();
  if (dataset.size() < 2) {
    throw usage_error("correlation graph needs at least 2 instances");
  }
  const int n = dataset.width();
  const auto rows = static_cast<double>(dataset.size());

  std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
  for (const auto& x : dataset.instances)
    for (int j = 0; j < n; ++j) mean[static_cast<std::size_t>(j)] += x[static_cast<std::size_t>(j)];
  for (auto& m : mean) m /= rows;

  std::vector<double> sd(static_cast<std::size_t>(n), 0.0);
  for (const auto& x : dataset.instances)
    for (int j = 0; j < n; ++j) {
      const double d = x[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
      sd[static_cast<std::size_t>(j)] += d * d;
    }
  for (int j = 0; j < n; ++j) {
    sd[static_cast<std::size_t>(j)] = std::sqrt(sd[static_cast<std::size_t>(j)]);
    if (sd[static_cast<std::size_t>(j)] == 0.0 && warnings) {
      warnings->push_back("feature column " + std::to_string(j) +
                          " has zero variance; correlations set to 0");
    }
  }

  FeatureGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double cov = 0.0;
      for (const auto& x : dataset.instances) {
        cov += (x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]) *
               (x[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
      }
      const double denom =
          sd[static_cast<std::size_t>(i)] * sd[static_cast<std::size_t>(j)];
      g.set_weight(i, j, denom == 0.0 ? 0.0 : cov / denom);
    }
  }
  return g;
}

// Spatial affinity: weight(i,j) = exp(-d(i,j)/2) for Euclidean distance
// between node centroids.
inline FeatureGraph distance_graph(const std::vector<std::vector<double>>& centroids) {
  const int n = static_cast<int>(centroids.size());
  if (n < 1) throw usage_error("distance graph needs at least one centroid");
  const std::size_t dim = centroids.front().size();
  for (const auto& c : centroids) {
    if (c.size() != dim) throw usage_error("centroids have mixed dimensions");
    check_finite(c, "centroid");
  }
  FeatureGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = centroids[static_cast<std::size_t>(i)][k] -
                         centroids[static_cast<std::size_t>(j)][k];
        d2 += d * d;
      }
      g.set_weight(i, j, std::exp(-std::sqrt(d2) / 2.0));
    }
  }
  return g;
}

// Element-wise mean of several graphs (e.g. one per subject).
inline FeatureGraph average_graphs(const std::vector<FeatureGraph>& graphs) {
  if (graphs.empty()) throw usage_error("cannot average zero graphs");
  const int n = graphs.front().n();
  for (const auto& g : graphs) {
    if (g.n() != n) throw usage_error("cannot average graphs of different sizes");
  }
  FeatureGraph avg(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (const auto& g : graphs) acc += g.weight(i, j);
      avg.set_weight(i, j, acc / static_cast<double>(graphs.size()));
    }
  }
  return avg;
}

// Strict thresholding: edge iff weight > threshold. When no threshold is
// given the mean off-diagonal weight is used.
inline BinaryAdjacency binarize(const FeatureGraph& graph,
                                std::optional<double> threshold = std::nullopt) {
  const double th = threshold.value_or(graph.mean_off_diagonal());
  BinaryAdjacency adj(graph.n(), th);
  for (int i = 0; i < graph.n(); ++i) {
    for (int j = i + 1; j < graph.n(); ++j) {
      if (graph.weight(i, j) > th) adj.set_edge(i, j);
    }
  }
  return adj;
}

// The 1-step neighborhood of r, always including r itself so a feature's
// context is never empty.
inline FeatureSet neighborhood(const BinaryAdjacency& adj, int r) {
  if (r < 0 || r >= adj.n()) {
    throw usage_error("node index " + std::to_string(r) +
                      " out of range for adjacency of size " +
                      std::to_string(adj.n()));
  }
  FeatureSet s(adj.n());
  s.insert(r);
  for (int j = 0; j < adj.n(); ++j) {
    if (j != r && adj.edge(r, j)) s.insert(j);
  }
  return s;
}

// A binary adjacency viewed as a 0/1-weighted graph, for running community
// detection on the thresholded structure.
inline FeatureGraph to_graph(const BinaryAdjacency& adj) {
  FeatureGraph g(adj.n());
  for (int i = 0; i < adj.n(); ++i)
    for (int j = i + 1; j < adj.n(); ++j)
      g.set_weight(i, j, adj.edge(i, j) ? 1.0 : 0.0);
  return g;
}

// ---- CSV import/export: header-less n x n rows of reals -------------------

inline void write_weight_matrix(std::ostream& out, const FeatureGraph& g) {
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (j) out << ',';
      out << format_double(g.weight(i, j));
    }
    out << '\n';
  }
}

inline FeatureGraph read_weight_matrix(std::istream& in,
                                       const std::string& context) {
  const auto rows = read_numeric_matrix(in, context);
  if (rows.empty()) throw io_error(context + ": empty weight matrix");
  if (rows.size() != rows.front().size()) {
    throw io_error(context + ": weight matrix must be square, got " +
                   std::to_string(rows.size()) + "x" +
                   std::to_string(rows.front().size()));
  }
  return FeatureGraph::from_matrix(rows);
}

inline FeatureGraph read_weight_matrix_file(const std::string& path) {
  auto in = open_input(path);
  return read_weight_matrix(in, path);
}

inline void write_adjacency(std::ostream& out, const BinaryAdjacency& adj) {
  for (int i = 0; i < adj.n(); ++i) {
    for (int j = 0; j < adj.n(); ++j) {
      if (j) out << ',';
      out << (i != j && adj.edge(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

inline BinaryAdjacency read_adjacency(std::istream& in, double threshold_used,
                                      const std::string& context) {
  const auto rows = read_numeric_matrix(in, context);
  if (rows.empty()) throw io_error(context + ": empty adjacency matrix");
  const int n = static_cast<int>(rows.size());
  BinaryAdjacency adj(n, threshold_used);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw io_error(context + ": adjacency matrix must be square");
    }
    for (int j = 0; j < n; ++j) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (v != 0.0 && v != 1.0) {
        throw io_error(context + ": adjacency entries must be 0 or 1 at row " +
                       std::to_string(i + 1) + ", column " + std::to_string(j + 1));
      }
      if (i != j && v == 1.0) adj.set_edge(i, j);
    }
  }
  // Symmetry of the input.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] !=
          rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        throw io_error(context + ": adjacency matrix is not symmetric at (" +
                       std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
  return adj;
}

}  // namespace svex

#endif  // SVEX_GRAPH_HPP
