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

#ifndef SVEX_SUBPROCESS_ORACLE_HPP
#define SVEX_SUBPROCESS_ORACLE_HPP

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "svex/error.hpp"
#include "svex/numeric.hpp"
#include "svex/oracle.hpp"

namespace svex {

// Wire protocol (UTF-8, one JSON object per line):
//   child -> parent on startup:  {"n_features": N, "n_classes": C}
//   parent -> child per batch:   {"instances": [[...], ...]}
//   child -> parent per batch:   {"probs": [[...], ...]}
// Replies preserve order and length. Numbers are written with 17
// significant digits so values survive the round trip bit-exactly.
//
// The oracle owns one child process. Requests are serialized through a
// mutex (concurrent_safe = false). If the child dies mid-request it is
// restarted once and the request replayed; a second failure fails the
// request. A timeout kills the child and fails the request; the next
// request spawns a fresh child.
class SubprocessOracle final : public PredictionOracle {
 public:
  SubprocessOracle(std::vector<std::string> argv, int expected_features,
                   int expected_classes, int timeout_ms = 10000)
      : PredictionOracle(expected_features, expected_classes,
                         OracleKind::subprocess, /*concurrent_safe=*/false),
        argv_(std::move(argv)), timeout_ms_(timeout_ms) {
    if (argv_.empty()) throw usage_error("subprocess oracle needs a command");
    ignore_sigpipe();
    std::lock_guard<std::mutex> lock(mu_);
    spawn_and_handshake();
  }

  // Adopts the child's declared class count from the handshake.
  static std::shared_ptr<SubprocessOracle> open(std::vector<std::string> argv,
                                                int expected_features,
                                                int timeout_ms = 10000) {
    const int classes =
        probe_handshake(argv, expected_features, timeout_ms);
    return std::make_shared<SubprocessOracle>(std::move(argv),
                                              expected_features, classes,
                                              timeout_ms);
  }

  ~SubprocessOracle() override { kill_child(); }

  SubprocessOracle(const SubprocessOracle&) = delete;
  SubprocessOracle& operator=(const SubprocessOracle&) = delete;

 private:
  std::vector<std::vector<double>> do_predict(
      const std::vector<Instance>& batch) const override {
    std::lock_guard<std::mutex> lock(mu_);
    std::string reply;
    try {
      reply = round_trip(encode_request(batch));
    } catch (const ChildDied&) {
      // One restart, then give up.
      kill_child();
      spawn_and_handshake();
      try {
        reply = round_trip(encode_request(batch));
      } catch (const ChildDied& e) {
        kill_child();
        throw oracle_error(std::string("oracle child died twice: ") + e.what());
      }
    }
    return decode_reply(reply, batch.size());
  }

  struct ChildDied {
    std::string message;
    const char* what() const { return message.c_str(); }
  };

  static void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
  }

  std::string encode_request(const std::vector<Instance>& batch) const {
    std::string line = "{\"instances\":[";
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (i) line += ',';
      line += '[';
      for (std::size_t j = 0; j < batch[i].size(); ++j) {
        if (j) line += ',';
        line += format_double(batch[i][j]);
      }
      line += ']';
    }
    line += "]}\n";
    return line;
  }

  std::vector<std::vector<double>> decode_reply(const std::string& line,
                                                std::size_t expected) const {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw oracle_error("oracle child sent malformed JSON: " +
                         std::string(e.what()) + "; raw reply: " + line);
    }
    if (!doc.contains("probs") || !doc["probs"].is_array()) {
      throw oracle_error("oracle reply lacks a \"probs\" array; raw reply: " +
                         line);
    }
    std::vector<std::vector<double>> out;
    out.reserve(expected);
    for (const auto& row : doc["probs"]) {
      if (!row.is_array()) {
        throw oracle_error("oracle reply rows must be arrays; raw reply: " +
                           line);
      }
      std::vector<double> probs;
      probs.reserve(row.size());
      for (const auto& v : row) {
        if (!v.is_number()) {
          throw oracle_error("oracle reply contains a non-number; raw reply: " +
                             line);
        }
        probs.push_back(v.get<double>());
      }
      out.push_back(std::move(probs));
    }
    return out;  // shape/validity enforced by the PredictionOracle boundary
  }

  // ---- process plumbing ----------------------------------------------------

  void spawn_and_handshake() const {
    spawn(argv_, child_pid_, child_stdin_, child_stdout_, read_buffer_);
    std::string line;
    try {
      line = read_line(timeout_ms_);
    } catch (const ChildDied& e) {
      kill_child();
      throw oracle_error(std::string("oracle child failed before handshake: ") +
                         e.what());
    }
    int nf = -1, nc = -1;
    try {
      const auto doc = nlohmann::json::parse(line);
      nf = doc.at("n_features").get<int>();
      nc = doc.at("n_classes").get<int>();
    } catch (const nlohmann::json::exception& e) {
      kill_child();
      throw oracle_error("malformed oracle handshake: " + std::string(e.what()) +
                         "; raw line: " + line);
    }
    if (nf != n_features() || nc != n_classes()) {
      kill_child();
      throw oracle_error("oracle handshake declares " + std::to_string(nf) +
                         " features / " + std::to_string(nc) +
                         " classes, configured for " +
                         std::to_string(n_features()) + " / " +
                         std::to_string(n_classes()));
    }
  }

  static int probe_handshake(const std::vector<std::string>& argv,
                             int expected_features, int timeout_ms) {
    if (argv.empty()) throw usage_error("subprocess oracle needs a command");
    ignore_sigpipe();
    pid_t pid = -1;
    int in = -1, out = -1;
    std::string buf;
    spawn(argv, pid, in, out, buf);
    std::string line;
    try {
      line = read_line_from(out, buf, timeout_ms, pid);
    } catch (const ChildDied& e) {
      reap(pid, in, out);
      throw oracle_error(std::string("oracle child failed before handshake: ") +
                         e.what());
    }
    reap(pid, in, out);
    try {
      const auto doc = nlohmann::json::parse(line);
      const int nf = doc.at("n_features").get<int>();
      const int nc = doc.at("n_classes").get<int>();
      if (nf != expected_features) {
        throw oracle_error("oracle handshake declares " + std::to_string(nf) +
                           " features, expected " +
                           std::to_string(expected_features));
      }
      return nc;
    } catch (const nlohmann::json::exception& e) {
      throw oracle_error("malformed oracle handshake: " + std::string(e.what()) +
                         "; raw line: " + line);
    }
  }

  static void spawn(const std::vector<std::string>& argv, pid_t& pid,
                    int& child_stdin, int& child_stdout, std::string& buffer) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
      throw oracle_error("failed to create pipes for oracle child");
    }
    pid = fork();
    if (pid < 0) throw oracle_error("failed to fork oracle child");
    if (pid == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> cargv;
      cargv.reserve(argv.size() + 1);
      for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
      cargv.push_back(nullptr);
      execvp(cargv[0], cargv.data());
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    child_stdin = to_child[1];
    child_stdout = from_child[0];
    buffer.clear();
  }

  static void reap(pid_t& pid, int& in, int& out) {
    if (in >= 0) close(in);
    if (out >= 0) close(out);
    if (pid > 0) {
      kill(pid, SIGKILL);
      int status = 0;
      waitpid(pid, &status, 0);
    }
    pid = -1;
    in = out = -1;
  }

  void kill_child() const { reap(child_pid_, child_stdin_, child_stdout_); }

  std::string round_trip(const std::string& request) const {
    if (child_pid_ < 0) spawn_and_handshake();
    write_all(request);
    return read_line(timeout_ms_);
  }

  void write_all(const std::string& data) const {
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n =
          ::write(child_stdin_, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ChildDied{std::string("write failed: ") + std::strerror(errno)};
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(int timeout_ms) const {
    return read_line_from(child_stdout_, read_buffer_, timeout_ms, child_pid_);
  }

  static std::string read_line_from(int fd, std::string& buffer, int timeout_ms,
                                    pid_t pid) {
    while (true) {
      const std::size_t nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      pollfd pfd{fd, POLLIN, 0};
      const int pr = poll(&pfd, 1, timeout_ms);
      if (pr == 0) {
        // Timed out: the child is wedged; kill it so the failure is crisp.
        if (pid > 0) kill(pid, SIGKILL);
        throw oracle_error("oracle child timed out after " +
                           std::to_string(timeout_ms) + " ms");
      }
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw ChildDied{std::string("poll failed: ") + std::strerror(errno)};
      }
      char chunk[4096];
      const ssize_t n = ::read(fd, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ChildDied{std::string("read failed: ") + std::strerror(errno)};
      }
      if (n == 0) throw ChildDied{"child closed its output"};
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::vector<std::string> argv_;
  int timeout_ms_;
  mutable std::mutex mu_;
  mutable pid_t child_pid_ = -1;
  mutable int child_stdin_ = -1;
  mutable int child_stdout_ = -1;
  mutable std::string read_buffer_;
};

}  // namespace svex

#endif  // SVEX_SUBPROCESS_ORACLE_HPP
