// Copyright 2026 The transduce Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace transduce {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad dimensions, mismatched layouts, out-of-range physical parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A propagator, solver or convergence loop failed to reach its target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An efficiency ratio whose denominator vanishes (e.g. alpha = 0).
class UndefinedEfficiency : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace transduce
