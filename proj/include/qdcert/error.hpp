// Copyright 2026 The qdcert Authors
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

#ifndef QDCERT_ERROR_HPP
#define QDCERT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// An operand had the wrong shape. Carries the expected and actual sizes.
class DimensionError : public Error {
   public:
    DimensionError(const std::string &what, std::size_t expected, std::size_t actual)
        : Error(what + " (expected " + std::to_string(expected) + ", got " + std::to_string(actual) + ")"),
          expected_(expected),
          actual_(actual) {
    }

    std::size_t expected() const noexcept {
        return expected_;
    }
    std::size_t actual() const noexcept {
        return actual_;
    }

   private:
    std::size_t expected_;
    std::size_t actual_;
};

/// A value violated an operation's precondition (non-unitary input, bad range, ...).
class PreconditionError : public Error {
   public:
    using Error::Error;
};

/// A tester was given fewer copies than its contract requires.
class InsufficientCopiesError : public PreconditionError {
   public:
    InsufficientCopiesError(std::size_t required, std::size_t provided)
        : PreconditionError(
              "insufficient copies: need at least " + std::to_string(required) + ", got " +
              std::to_string(provided)),
          required_(required) {
    }
    std::size_t required() const noexcept {
        return required_;
    }

   private:
    std::size_t required_;
};

/// A node message exceeded the (n_c, n_q) communication budget.
class BudgetViolation : public Error {
   public:
    using Error::Error;
};

/// An exhaustive computation would be too large; use the sampled variant instead.
class EnumerationTooLarge : public Error {
   public:
    using Error::Error;
};

}  // namespace qdcert

#endif
