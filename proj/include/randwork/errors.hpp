// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace randwork {

// Base of every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateInterval : public Error {
public:
  using Error::Error;
};

class IndexError : public Error {
public:
  using Error::Error;
};

// Raised when a computable map is fed a Cauchy-name prefix shorter than it needs.
class DemandError : public Error {
public:
  DemandError(std::size_t required, std::size_t available)
      : Error("input prefix too short: need " + std::to_string(required) +
              " entries, have " + std::to_string(available)),
        required_(required) {}
  std::size_t required() const noexcept { return required_; }

private:
  std::size_t required_;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

// A stated invariant failed on concrete data.
class ContractViolation : public Error {
public:
  using Error::Error;
};

class ScriptError : public Error {
public:
  using Error::Error;
};

// Unknown experiment id or ill-typed parameter.
class UsageError : public Error {
public:
  using Error::Error;
};

} // namespace randwork
