#pragma once

#include <stdexcept>
#include <string>

namespace nids {

/// Base error for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV content, schema, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A model or metrics document could not be decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error with the pipeline stage it was raised in.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace nids
