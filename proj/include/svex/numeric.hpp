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

#ifndef SVEX_NUMERIC_HPP
#define SVEX_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace svex {

// Table of log-factorials: log_factorials(n)[k] = ln(k!).
// Built by running summation; all Shapley subset weights are formed in
// log space so they stay finite for coalition sizes near 20 and beyond.
inline std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 2; k <= n; ++k) {
    lf[static_cast<std::size_t>(k)] =
        lf[static_cast<std::size_t>(k) - 1] + std::log(static_cast<double>(k));
  }
  return lf;
}

// Subset-form Shapley weight |S|! (n-1-|S|)! / n! for a coalition of n
// players and a subset of size s, 0 <= s <= n-1.
inline double shapley_subset_weight(const std::vector<double>& lf, int n,
                                    int s) {
  return std::exp(lf[static_cast<std::size_t>(s)] +
                  lf[static_cast<std::size_t>(n - 1 - s)] -
                  lf[static_cast<std::size_t>(n)]);
}

// Exact binomial coefficient as a double. Safe for n <= 30 or so; callers
// in the identity scan stay at n <= 12 where every value is an exact integer.
inline double binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double num = 1.0;
  for (int i = 1; i <= k; ++i) {
    num = num * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(num);
}

// Pairwise (cascade) summation. Associativity is fixed by the recursion,
// so the result is independent of how the inputs were produced.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_stddev(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(n - 1));
}

// Clamp a probability into [floor, 1] before it goes under a log.
inline double clamp_prob(double p, double floor) {
  if (p < floor) return floor;
  if (p > 1.0) return 1.0;
  return p;
}

// Round-trip-exact decimal rendering (17 significant digits), used for
// every number that crosses a file or wire boundary.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace svex

#endif  // SVEX_NUMERIC_HPP
