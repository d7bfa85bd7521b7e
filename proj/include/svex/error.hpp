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

#ifndef SVEX_ERROR_HPP
#define SVEX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace svex {

// Error classes map 1:1 onto CLI exit codes: usage -> 2, oracle -> 3,
// validation -> 1. Anything else is a plain std::exception and exits 1.
enum class ErrorClass { usage, oracle, validation, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}

  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorClass::usage, what);
}
inline Error oracle_error(const std::string& what) {
  return Error(ErrorClass::oracle, what);
}
inline Error validation_error(const std::string& what) {
  return Error(ErrorClass::validation, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorClass::io, what);
}

}  // namespace svex

#endif  // SVEX_ERROR_HPP
