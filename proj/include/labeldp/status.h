// Copyright 2026 The LabelDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LABELDP_STATUS_H_
#define LABELDP_STATUS_H_

#include <stdexcept>
#include <string>

namespace labeldp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied values was violated.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. `line()` is 1-based; 0 when not applicable.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, int line)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + message
                            : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Inconsistent combination of options (e.g. posterior kind vs. noise kind).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training diverged or could not make progress.
class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace labeldp

#endif  // LABELDP_STATUS_H_
