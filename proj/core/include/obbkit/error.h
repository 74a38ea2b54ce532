// Copyright 2026 The obbkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OBBKIT_ERROR_H_
#define OBBKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace obbkit {

// Thrown when an argument violates a documented precondition (degenerate
// box, bad probability vector, mismatched batch sizes, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown by the annotation/detection readers. `line()` is 1-based, or 0 when
// the failure is not tied to a specific line (missing file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Non-finite intermediate (exp overflow, NaN in a numeric evaluation).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace obbkit

#endif  // OBBKIT_ERROR_H_
