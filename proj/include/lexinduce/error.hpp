#pragma once

#include <stdexcept>
#include <string>

namespace lexinduce {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid sizes, hyperparameters or flag combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed user-supplied data.
class InputError : public Error {
 public:
  using Error::Error;
};

// Serialized artifact (grammar, JSON lines) does not match its schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A LexTree that violates span/head consistency.
class StructureError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexinduce
