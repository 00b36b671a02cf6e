// Copyright 2026 The LexForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEXFORGE_ERRORS_H_
#define LEXFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lexforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or record. Carries the offending line (1-based, 0 when
// unknown) so callers can point users at it.
class ParseError : public Error {
 public:
  ParseError(const std::string &source, int line, const std::string &what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        source_(source),
        line_(line) {}

  const std::string &source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Arrays or corpora whose shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Loss or gradient became NaN/inf during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexforge

#endif  // LEXFORGE_ERRORS_H_
