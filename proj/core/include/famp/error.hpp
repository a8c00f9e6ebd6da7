#pragma once

#include <stdexcept>
#include <string>

namespace famp {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dimensions or grids of two operands do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// Normal equations are rank deficient and no ridge term was supplied.
class IllConditionedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A covariance or distribution violates symmetry / PSD requirements.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition (e.g. replanning inside cooldown).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// The simulated environment reached a non-finite state.
class EnvironmentFault : public Error {
 public:
  using Error::Error;
};

}  // namespace famp
