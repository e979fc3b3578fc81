#pragma once

#include <stdexcept>
#include <string>

namespace edgegen {

/// A configuration value is outside its documented domain.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A document could not be parsed; `what()` carries line context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document declares a schema version this build does not understand.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NaN or infinity surfaced in the simulation or the learner.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgegen
