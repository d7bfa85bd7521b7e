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

#ifndef SVEX_INSTANCE_HPP
#define SVEX_INSTANCE_HPP

#include <cmath>
#include <istream>
#include <string>
#include <vector>

#include "svex/csv.hpp"
#include "svex/error.hpp"

namespace svex {

// One feature vector, as seen by a classifier.
using Instance = std::vector<double>;

inline void check_finite(const Instance& x, const std::string& what) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw usage_error(what + " contains a non-finite value");
    }
  }
}

// The empirical sample that stands in for the training distribution when
// corrupted features are marginalized out.
struct BackgroundDataset {
  std::vector<std::string> feature_names;  // may be empty (unnamed)
  std::vector<Instance> instances;

  int width() const {
    return instances.empty() ? 0 : static_cast<int>(instances.front().size());
  }
  std::size_t size() const { return instances.size(); }

  void validate() const {
    if (instances.empty()) {
      throw usage_error("background dataset is empty");
    }
    const std::size_t w = instances.front().size();
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].size() != w) {
        throw usage_error("background row " + std::to_string(i + 1) + " has " +
                          std::to_string(instances[i].size()) +
                          " features, expected " + std::to_string(w));
      }
      check_finite(instances[i], "background row " + std::to_string(i + 1));
    }
  }
};

// CSV ingestion: a header row of feature names followed by numeric rows.
inline BackgroundDataset read_dataset_csv(std::istream& in,
                                          const std::string& context) {
  BackgroundDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (ds.feature_names.empty()) {
      ds.feature_names = fields;
      continue;
    }
    if (fields.size() != ds.feature_names.size()) {
      throw io_error(context + " row " + std::to_string(lineno) + " has " +
                     std::to_string(fields.size()) + " columns, expected " +
                     std::to_string(ds.feature_names.size()));
    }
    Instance row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row.push_back(parse_double(
          fields[c], context + " row " + std::to_string(lineno) + ", column " +
                         std::to_string(c + 1)));
    }
    ds.instances.push_back(std::move(row));
  }
  ds.validate();
  return ds;
}

inline BackgroundDataset read_dataset_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_dataset_csv(in, path);
}

}  // namespace svex

#endif  // SVEX_INSTANCE_HPP
