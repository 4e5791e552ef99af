#pragma once

#include <stdexcept>
#include <string>

namespace latchbench {

/// Base for every error the harness raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or record.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A payload cannot be placed where the trajectory geometry asks for it.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Raised when an argument violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace latchbench
