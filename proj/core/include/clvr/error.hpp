// Copyright 2026 The clvr Authors
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

#ifndef CLVR_ERROR_HPP_
#define CLVR_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clvr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument is outside its documented domain (block size 0, gamma <= 0...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix sizes do not agree, or an index is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A primal point violates the coordinate constraints where feasibility is
// required (the Lagrangian would be +infinity).
class InfeasiblePointError : public Error {
 public:
  using Error::Error;
};

// The operation needs a standard-form LP (r == 0, x >= 0) and got something
// else, or a requested reformulation has no supported implementation.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace clvr

#endif  // CLVR_ERROR_HPP_
