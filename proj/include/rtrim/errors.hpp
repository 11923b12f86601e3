#pragma once

#include <stdexcept>
#include <string>

namespace rtrim {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run configuration (rejected knobs, impossible budgets).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data: datasets, scenario files, run logs.
class DataError : public Error {
 public:
  using Error::Error;
};

// Degenerate evaluation state, e.g. no parsable answers or an undefined metric.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Any backend-side failure.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure after retries were exhausted.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

// The service answered, but the payload violates the expected protocol.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace rtrim
