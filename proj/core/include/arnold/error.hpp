#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arnold {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the 0-based character position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside a function's real domain (sqrt(-1), log(0), overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow or step budget exhausted in the ODE integrator.
class IntegratorError : public Error {
 public:
  IntegratorError(const std::string& what, double t_reached)
      : Error(what + " (t reached = " + std::to_string(t_reached) + ")"), t_reached_(t_reached) {}
  double t_reached() const noexcept { return t_reached_; }

 private:
  double t_reached_;
};

/// A time or transformed time lies outside the interval where a map is defined.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Incompatible grids, times or pictures between frames.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Precondition on inputs violated (bad parameter, unsupported configuration).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Scenario file problem; carries the key path and source line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key_path, std::size_t line, const std::string& what)
      : Error(key_path + " (line " + std::to_string(line) + "): " + what),
        key_path_(key_path),
        line_(line) {}
  const std::string& key_path() const noexcept { return key_path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_path_;
  std::size_t line_;
};

}  // namespace arnold
