#pragma once

#include <stdexcept>
#include <string>

namespace critobs {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: unknown names, dimension mismatches,
/// critical sets that do not fit the model.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (product size, scan length) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition, e.g. firing a disabled
/// transition.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace critobs
