#pragma once

#include <stdexcept>
#include <string>

namespace fieldnet {

/// Base of every error the library throws. The CLI maps the three
/// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A file or stream could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input that is readable but violates a data contract
/// (malformed rows, self-loops, unknown nodes, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace fieldnet
