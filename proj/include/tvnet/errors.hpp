#pragma once

#include <stdexcept>
#include <string>

namespace tvnet {

// Invalid parameters or inputs supplied by the caller. The CLI maps these to
// exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidCenterSet : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class OutOfRange : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidNodeSets : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InstanceTooSmall : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Problems with input data (unreadable file, malformed record, partition that
// cannot be honored). Exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InfeasiblePartition : public DataError {
 public:
  using DataError::DataError;
};

// A non-finite iterate appeared during a run. Exit code 4.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long round, double gamma);
  long round() const noexcept { return round_; }
  double gamma() const noexcept { return gamma_; }

 private:
  long round_;
  double gamma_;
};

}  // namespace tvnet
