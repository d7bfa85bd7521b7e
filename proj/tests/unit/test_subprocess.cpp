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

#include "svex/subprocess_oracle.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "svex/oracle.hpp"

namespace {

const std::string kChild = std::string(SVEX_SOURCE_DIR) + "/tools/or_oracle.py";

std::vector<std::string> child_argv(std::vector<std::string> extra = {}) {
  std::vector<std::string> argv{"python3", kChild};
  argv.insert(argv.end(), extra.begin(), extra.end());
  return argv;
}

}  // namespace

TEST_CASE("subprocess child matches the builtin or gate") {
  svex::SubprocessOracle oracle(child_argv(), 2, 2);
  svex::OrGateOracle builtin;
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0})
      REQUIRE(oracle.predict({a, b}) == builtin.predict({a, b}));
}

TEST_CASE("large batches round-trip in order") {
  svex::SubprocessOracle oracle(child_argv(), 2, 2);
  svex::OrGateOracle builtin;
  std::vector<svex::Instance> batch;
  for (int i = 0; i < 1000; ++i) {
    batch.push_back({static_cast<double>(i % 2), static_cast<double>((i / 2) % 2)});
  }
  REQUIRE(oracle.predict_batch(batch) == builtin.predict_batch(batch));
}

TEST_CASE("shape violations surface as typed oracle errors") {
  svex::SubprocessOracle oracle(child_argv({"--bad-shape"}), 2, 2);
  REQUIRE_THROWS_MATCHES(
      oracle.predict({1.0, 1.0}), svex::Error,
      Catch::Matchers::Predicate<svex::Error>([](const svex::Error& e) {
        return e.error_class() == svex::ErrorClass::oracle;
      }));
}

TEST_CASE("handshake mismatch is rejected") {
  REQUIRE_THROWS_WITH(svex::SubprocessOracle(child_argv(), 3, 2),
                      Catch::Matchers::ContainsSubstring("handshake"));
}

TEST_CASE("timeouts kill the child and fail the request") {
  svex::SubprocessOracle oracle(child_argv({"--sleep-ms", "2000"}), 2, 2,
                                /*timeout_ms=*/200);
  REQUIRE_THROWS_WITH(oracle.predict({1.0, 0.0}),
                      Catch::Matchers::ContainsSubstring("timed out"));
}

TEST_CASE("a crashed child is restarted once and the request replayed") {
  std::string flag = std::string(SVEX_SOURCE_DIR) + "/build-crash-flag.tmp";
  std::remove(flag.c_str());
  svex::SubprocessOracle oracle(child_argv({"--crash-flag", flag}), 2, 2);
  // First request kills the first child; the restarted child finds the flag
  // file and serves the replayed request.
  REQUIRE(oracle.predict({1.0, 0.0}) == std::vector<double>{0.0, 1.0});
  std::remove(flag.c_str());
}

TEST_CASE("adopting the handshake class count") {
  auto oracle = svex::SubprocessOracle::open(child_argv(), 2);
  REQUIRE(oracle->n_classes() == 2);
}

TEST_CASE("missing executable fails cleanly") {
  REQUIRE_THROWS_AS(
      svex::SubprocessOracle({"/definitely/not/a/real/binary"}, 2, 2),
      svex::Error);
}
