#pragma once

#include <stdexcept>
#include <string>

namespace streamsched {

// Base of every error the library raises. The CLI maps InputError subclasses
// to exit code 2 and anything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (bad JSON, wrong field types, missing fields).
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Well-formed input that breaks a graph invariant (cycle, dangling edge, ...).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// GPU configuration that cannot host the workload, or has invalid capacities.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// A stream plan or launch order that does not cover the graph correctly.
class ConstraintViolation : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace streamsched
