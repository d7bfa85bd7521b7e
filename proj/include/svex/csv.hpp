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

#ifndef SVEX_CSV_HPP
#define SVEX_CSV_HPP

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "svex/error.hpp"

namespace svex {

// Minimal CSV handling for the numeric formats this project reads and
// writes: no quoting, no embedded commas, comma separator only.

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    // Trim surrounding whitespace and a trailing CR from DOS line endings.
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ' ||
                              field.back() == '\t'))
      field.pop_back();
    std::size_t lead = 0;
    while (lead < field.size() && (field[lead] == ' ' || field[lead] == '\t'))
      ++lead;
    out.push_back(field.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Locale-independent double parsing; accepts inf/-inf/nan spellings.
inline bool try_parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc() && ptr == last) return true;
  // from_chars rejects a leading '+'; strtod covers that spelling.
  std::string owned(text);
  char* end = nullptr;
  out = std::strtod(owned.c_str(), &end);
  return end == owned.c_str() + owned.size() && end != owned.c_str();
}

inline double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  if (!try_parse_double(text, v)) {
    throw io_error("expected a number at " + where + ", got \"" + text + "\"");
  }
  return v;
}

// Reads a header-less numeric matrix; every row must have the same width.
// Errors point at the offending 1-based row and column.
inline std::vector<std::vector<double>> read_numeric_matrix(
    std::istream& in, const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row.push_back(parse_double(
          fields[c], context + " row " + std::to_string(lineno) + ", column " +
                         std::to_string(c + 1)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw io_error(context + " row " + std::to_string(lineno) + " has " +
                     std::to_string(row.size()) + " columns, expected " +
                     std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace svex

#endif  // SVEX_CSV_HPP
