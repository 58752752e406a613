#pragma once

#include <stdexcept>
#include <string>

namespace vlasteer {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instruction text outside the task grammar.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Scene/config mismatch: a subgoal or candidate references something that
// does not exist or cannot be achieved.
class PlanningError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized state.
class BlobError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or unknown configuration key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace vlasteer
