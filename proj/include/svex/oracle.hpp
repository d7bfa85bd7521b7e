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

#ifndef SVEX_ORACLE_HPP
#define SVEX_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "svex/error.hpp"
#include "svex/instance.hpp"

namespace svex {

enum class OracleKind { or_gate, linear_softmax, lookup_table, subprocess };

// Black-box classifier: instance in, class-probability vector out.
//
// predict_batch is the only entry point; it enforces the probability
// contract (entries >= 0, sum within 1e-6 of 1, one row per instance) on
// every oracle kind, so downstream code never sees an invalid vector.
class PredictionOracle {
 public:
  virtual ~PredictionOracle() = default;

  int n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }
  OracleKind kind() const { return kind_; }
  bool concurrent_safe() const { return concurrent_safe_; }

  std::vector<std::vector<double>> predict_batch(
      const std::vector<Instance>& batch) const {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (static_cast<int>(batch[i].size()) != n_features_) {
        throw oracle_error("instance " + std::to_string(i) + " has " +
                           std::to_string(batch[i].size()) +
                           " features, oracle expects " +
                           std::to_string(n_features_));
      }
    }
    auto out = do_predict(batch);
    if (out.size() != batch.size()) {
      throw oracle_error("oracle returned " + std::to_string(out.size()) +
                         " rows for " + std::to_string(batch.size()) +
                         " instances");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      validate_probability_vector(out[i], i);
    }
    return out;
  }

  std::vector<double> predict(const Instance& x) const {
    return predict_batch({x}).front();
  }

 protected:
  PredictionOracle(int n_features, int n_classes, OracleKind kind,
                   bool concurrent_safe)
      : n_features_(n_features), n_classes_(n_classes), kind_(kind),
        concurrent_safe_(concurrent_safe) {
    if (n_features_ < 1) throw usage_error("oracle needs at least one feature");
    if (n_classes_ < 2) throw usage_error("oracle needs at least two classes");
  }

  virtual std::vector<std::vector<double>> do_predict(
      const std::vector<Instance>& batch) const = 0;

  void validate_probability_vector(const std::vector<double>& p,
                                   std::size_t index) const {
    if (static_cast<int>(p.size()) != n_classes_) {
      throw oracle_error("prediction for instance " + std::to_string(index) +
                         " has " + std::to_string(p.size()) +
                         " entries, expected " + std::to_string(n_classes_));
    }
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw oracle_error("prediction for instance " + std::to_string(index) +
                           " has an invalid entry " + std::to_string(v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw oracle_error("prediction for instance " + std::to_string(index) +
                         " sums to " + std::to_string(sum) + ", not 1");
    }
  }

 private:
  int n_features_;
  int n_classes_;
  OracleKind kind_;
  bool concurrent_safe_;
};

using OraclePtr = std::shared_ptr<const PredictionOracle>;

// Boolean OR over two features: p(class 1) = 1 when either feature is on.
// Emits hard 0/1 probabilities, which is exactly what makes it a good
// stress case for the log clamping downstream.
class OrGateOracle final : public PredictionOracle {
 public:
  OrGateOracle()
      : PredictionOracle(2, 2, OracleKind::or_gate, /*concurrent_safe=*/true) {}

 private:
  std::vector<std::vector<double>> do_predict(
      const std::vector<Instance>& batch) const override {
    std::vector<std::vector<double>> out;
    out.reserve(batch.size());
    for (const auto& x : batch) {
      const bool on = x[0] >= 0.5 || x[1] >= 0.5;
      out.push_back(on ? std::vector<double>{0.0, 1.0}
                       : std::vector<double>{1.0, 0.0});
    }
    return out;
  }
};

// The four corners of the OR domain, in lexicographic order. Used as the
// canonical background for the or-gate walkthrough.
inline BackgroundDataset or_domain() {
  BackgroundDataset ds;
  ds.feature_names = {"x0", "x1"};
  ds.instances = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
  return ds;
}

// softmax(W x + b) with a C x N weight matrix.
class LinearSoftmaxOracle final : public PredictionOracle {
 public:
  LinearSoftmaxOracle(std::vector<std::vector<double>> weights,
                      std::vector<double> bias)
      : PredictionOracle(weights.empty() ? 0 : static_cast<int>(weights.front().size()),
                         static_cast<int>(weights.size()),
                         OracleKind::linear_softmax, /*concurrent_safe=*/true),
        weights_(std::move(weights)), bias_(std::move(bias)) {
    if (bias_.size() != weights_.size()) {
      throw usage_error("bias length must equal the class count");
    }
    for (const auto& row : weights_) {
      if (row.size() != weights_.front().size()) {
        throw usage_error("weight matrix rows have mixed widths");
      }
    }
  }

 private:
  std::vector<std::vector<double>> do_predict(
      const std::vector<Instance>& batch) const override {
    std::vector<std::vector<double>> out;
    out.reserve(batch.size());
    for (const auto& x : batch) {
      std::vector<double> logits(bias_);
      for (std::size_t c = 0; c < weights_.size(); ++c) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          logits[c] += weights_[c][j] * x[j];
        }
      }
      double max_logit = logits.front();
      for (double l : logits) max_logit = std::max(max_logit, l);
      double z = 0.0;
      for (double& l : logits) {
        l = std::exp(l - max_logit);
        z += l;
      }
      for (double& l : logits) l /= z;
      out.push_back(std::move(logits));
    }
    return out;
  }

  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

// Exact table lookup over a discrete domain; instances are keyed by
// rounding each coordinate to the nearest integer. Enables exhaustive
// small-domain constructions where the true conditional is known.
class LookupTableOracle final : public PredictionOracle {
 public:
  using Key = std::vector<long long>;

  LookupTableOracle(int n_features, int n_classes,
                    std::map<Key, std::vector<double>> table)
      : PredictionOracle(n_features, n_classes, OracleKind::lookup_table,
                         /*concurrent_safe=*/true),
        table_(std::move(table)) {
    if (table_.empty()) throw usage_error("lookup table is empty");
    for (const auto& [key, probs] : table_) {
      if (static_cast<int>(key.size()) != n_features ||
          static_cast<int>(probs.size()) != n_classes) {
        throw usage_error("lookup table entry has the wrong shape");
      }
    }
  }

  static Key key_of(const Instance& x) {
    Key k;
    k.reserve(x.size());
    for (double v : x) k.push_back(std::llround(v));
    return k;
  }

 private:
  std::vector<std::vector<double>> do_predict(
      const std::vector<Instance>& batch) const override {
    std::vector<std::vector<double>> out;
    out.reserve(batch.size());
    for (const auto& x : batch) {
      const auto it = table_.find(key_of(x));
      if (it == table_.end()) {
        std::string coords;
        for (double v : x) coords += (coords.empty() ? "" : ",") + std::to_string(v);
        throw oracle_error("instance (" + coords +
                           ") is outside the lookup oracle's domain");
      }
      out.push_back(it->second);
    }
    return out;
  }

  std::map<Key, std::vector<double>> table_;
};

// Evaluates a batch in chunks of at most batch_size instances. The result
// is identical however the batch is split; the chunking only bounds the
// size of each round-trip to the oracle.
inline std::vector<std::vector<double>> oracle_eval(
    const PredictionOracle& oracle, const std::vector<Instance>& instances,
    std::size_t batch_size = 256) {
  if (batch_size == 0) batch_size = 1;
  std::vector<std::vector<double>> out;
  out.reserve(instances.size());
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    const std::size_t end = std::min(instances.size(), start + batch_size);
    std::vector<Instance> chunk(instances.begin() + static_cast<std::ptrdiff_t>(start),
                                instances.begin() + static_cast<std::ptrdiff_t>(end));
    auto part = oracle.predict_batch(chunk);
    for (auto& row : part) out.push_back(std::move(row));
  }
  return out;
}

}  // namespace svex

#endif  // SVEX_ORACLE_HPP
