#pragma once

#include <stdexcept>
#include <string>

namespace denseset {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: out-of-range parameters, dimension mismatches, malformed input.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// The requested coverage cannot be met by any candidate set.
class Infeasible : public Error {
public:
  using Error::Error;
};

// A search exceeded its configured candidate budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) {
    throw InvalidArgument(msg);
  }
}

inline void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (expected " +
                          std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace detail

}  // namespace denseset
