#pragma once

#include <stdexcept>
#include <string>

namespace dtopics {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes (usage 1, data 2, invariant 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data that is malformed or cannot support the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtopics
