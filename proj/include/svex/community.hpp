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

#ifndef SVEX_COMMUNITY_HPP
#define SVEX_COMMUNITY_HPP

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "svex/csv.hpp"
#include "svex/error.hpp"
#include "svex/feature_set.hpp"
#include "svex/graph.hpp"

namespace svex {

// Non-overlapping cover of the node set: every node belongs to exactly one
// community. Communities are ordered by their smallest member and labels
// renumbered accordingly, so the representation is canonical.
struct CommunityPartition {
  std::vector<int> labels;             // node -> community id
  std::vector<FeatureSet> communities; // id -> member set

  int n() const { return static_cast<int>(labels.size()); }
  int community_count() const { return static_cast<int>(communities.size()); }

  static CommunityPartition from_labels(const std::vector<int>& raw_labels) {
    const int n = static_cast<int>(raw_labels.size());
    if (n == 0) throw usage_error("partition of an empty node set");

    // Map raw ids to canonical ids in order of first appearance by node
    // index, which equals ordering communities by smallest member.
    std::vector<int> remap;
    std::vector<int> canonical(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      const int raw = raw_labels[static_cast<std::size_t>(i)];
      if (raw < 0) throw usage_error("community ids must be non-negative");
      int found = -1;
      for (std::size_t k = 0; k < remap.size(); ++k) {
        if (remap[k] == raw) { found = static_cast<int>(k); break; }
      }
      if (found < 0) {
        remap.push_back(raw);
        found = static_cast<int>(remap.size()) - 1;
      }
      canonical[static_cast<std::size_t>(i)] = found;
    }

    CommunityPartition p;
    p.labels = canonical;
    p.communities.assign(remap.size(), FeatureSet(n));
    for (int i = 0; i < n; ++i) {
      p.communities[static_cast<std::size_t>(canonical[static_cast<std::size_t>(i)])]
          .insert(i);
    }
    return p;
  }

  static CommunityPartition singletons(int n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
    return from_labels(labels);
  }

  void validate(int expected_n) const {
    if (n() != expected_n) {
      throw usage_error("partition covers " + std::to_string(n()) +
                        " nodes, expected " + std::to_string(expected_n));
    }
    FeatureSet seen(expected_n);
    for (const auto& c : communities) {
      if (c.empty()) throw usage_error("empty community in partition");
      if (!c.set_intersection(seen).empty()) {
        throw usage_error("communities overlap");
      }
      seen = seen.set_union(c);
    }
    if (seen.count() != expected_n) {
      throw usage_error("partition does not cover every node");
    }
  }
};

namespace detail {

// Positive part of the weight matrix, excluding the diagonal. Negative
// affinities carry no connectivity: they contribute neither edges nor
// degree to the modularity null model.
inline double positive_weight(const FeatureGraph& g, int i, int j) {
  if (i == j) return 0.0;
  const double w = g.weight(i, j);
  return w > 0.0 ? w : 0.0;
}

}  // namespace detail

// Newman-Girvan modularity Q = sum_c (e_cc - a_c^2), where e_cc is the
// fraction of edge weight inside community c and a_c the fraction of degree
// attached to it.
inline double modularity(const FeatureGraph& graph,
                         const CommunityPartition& partition) {
  partition.validate(graph.n());
  const int n = graph.n();

  double total = 0.0;  // sum over ordered pairs, i.e. 2x the edge weight
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += detail::positive_weight(graph, i, j);
  if (total == 0.0) return 0.0;

  double q = 0.0;
  for (const auto& c : partition.communities) {
    const auto members = c.members();
    double internal = 0.0;
    double degree = 0.0;
    for (int i : members) {
      for (int j = 0; j < n; ++j) {
        const double w = detail::positive_weight(graph, i, j);
        degree += w;
        if (c.contains(j)) internal += w;
      }
    }
    const double e_cc = internal / total;
    const double a_c = degree / total;
    q += e_cc - a_c * a_c;
  }
  return q;
}

struct CommunityDetectionResult {
  CommunityPartition partition;
  double modularity = 0.0;
  // Q after the initial all-singleton state and after every merge.
  std::vector<double> q_trace;
  // Label snapshots matching q_trace, recorded when trace is requested.
  std::vector<std::vector<int>> label_trace;
  // True when the graph had no positive-weight edge and the all-singleton
  // fallback was returned.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

// Greedy agglomerative modularity maximization: start from singleton
// communities, repeatedly merge the pair with the largest modularity gain,
// stop when no merge improves Q. Ties break toward the lowest community-id
// pair, so the outcome is deterministic.
inline CommunityDetectionResult detect_communities(const FeatureGraph& graph,
                                                   bool record_trace = false) {
  const int n = graph.n();
  CommunityDetectionResult res;

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += detail::positive_weight(graph, i, j);

  if (total == 0.0) {
    res.partition = CommunityPartition::singletons(n);
    res.modularity = 0.0;
    res.degenerate = true;
    res.warnings.push_back(
        "graph has no positive-weight edges; returning singleton communities");
    return res;
  }

  // e[c][d]: fraction of ordered-pair weight between communities c and d;
  // a[c]: fraction of degree in c. Merging c,d changes Q by 2(e_cd - a_c a_d).
  std::vector<std::vector<double>> e(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = detail::positive_weight(graph, i, j) / total;
      e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = w;
      a[static_cast<std::size_t>(i)] += w;
    }
  }

  std::vector<int> label(static_cast<std::size_t>(n));
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  for (int i = 0; i < n; ++i) label[static_cast<std::size_t>(i)] = i;

  double q = 0.0;
  for (int c = 0; c < n; ++c) {
    q += e[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)] -
         a[static_cast<std::size_t>(c)] * a[static_cast<std::size_t>(c)];
  }
  res.q_trace.push_back(q);
  if (record_trace) res.label_trace.push_back(label);

  // Gains at or below this are treated as no improvement; keeps the
  // strict-increase guarantee meaningful under floating-point noise.
  constexpr double kGainEps = 1e-12;

  while (true) {
    double best_gain = 0.0;
    int best_c = -1, best_d = -1;
    for (int c = 0; c < n; ++c) {
      if (!active[static_cast<std::size_t>(c)]) continue;
      for (int d = c + 1; d < n; ++d) {
        if (!active[static_cast<std::size_t>(d)]) continue;
        const double gain =
            2.0 * (e[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] -
                   a[static_cast<std::size_t>(c)] * a[static_cast<std::size_t>(d)]);
        // First pair wins ties, which is the lowest (c,d) in scan order.
        if (gain > best_gain + kGainEps) {
          best_gain = gain;
          best_c = c;
          best_d = d;
        }
      }
    }
    if (best_c < 0) break;

    // Absorb d into c (the lower id survives).
    for (int k = 0; k < n; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == best_c || k == best_d)
        continue;
      e[static_cast<std::size_t>(best_c)][static_cast<std::size_t>(k)] +=
          e[static_cast<std::size_t>(best_d)][static_cast<std::size_t>(k)];
      e[static_cast<std::size_t>(k)][static_cast<std::size_t>(best_c)] =
          e[static_cast<std::size_t>(best_c)][static_cast<std::size_t>(k)];
    }
    e[static_cast<std::size_t>(best_c)][static_cast<std::size_t>(best_c)] +=
        e[static_cast<std::size_t>(best_d)][static_cast<std::size_t>(best_d)] +
        2.0 * e[static_cast<std::size_t>(best_c)][static_cast<std::size_t>(best_d)];
    a[static_cast<std::size_t>(best_c)] += a[static_cast<std::size_t>(best_d)];
    active[static_cast<std::size_t>(best_d)] = false;
    for (int i = 0; i < n; ++i) {
      if (label[static_cast<std::size_t>(i)] == best_d)
        label[static_cast<std::size_t>(i)] = best_c;
    }
    q += best_gain;
    res.q_trace.push_back(q);
    if (record_trace) res.label_trace.push_back(label);
  }

  res.partition = CommunityPartition::from_labels(label);
  res.modularity = modularity(graph, res.partition);
  return res;
}

// ---- CSV import/export: (node_id, community_id) rows ----------------------

inline void write_partition(std::ostream& out, const CommunityPartition& p) {
  out << "node_id,community_id\n";
  for (int i = 0; i < p.n(); ++i) {
    out << i << ',' << p.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

inline CommunityPartition read_partition(std::istream& in,
                                         const std::string& context) {
  std::string line;
  std::vector<std::pair<int, int>> pairs;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (lineno == 1 && !fields.empty() && fields[0] == "node_id") continue;
    if (fields.size() != 2) {
      throw io_error(context + " row " + std::to_string(lineno) +
                     ": expected node_id,community_id");
    }
    const double node = parse_double(fields[0], context + " row " +
                                                     std::to_string(lineno) +
                                                     ", column 1");
    const double comm = parse_double(fields[1], context + " row " +
                                                     std::to_string(lineno) +
                                                     ", column 2");
    pairs.emplace_back(static_cast<int>(node), static_cast<int>(comm));
  }
  if (pairs.empty()) throw io_error(context + ": empty partition");
  const int n = static_cast<int>(pairs.size());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (auto [node, comm] : pairs) {
    if (node < 0 || node >= n || labels[static_cast<std::size_t>(node)] != -1) {
      throw io_error(context + ": node ids must be 0.." + std::to_string(n - 1) +
                     " each exactly once");
    }
    labels[static_cast<std::size_t>(node)] = comm;
  }
  return CommunityPartition::from_labels(labels);
}

inline CommunityPartition read_partition_file(const std::string& path) {
  auto in = open_input(path);
  return read_partition(in, path);
}

}  // namespace svex

#endif  // SVEX_COMMUNITY_HPP
