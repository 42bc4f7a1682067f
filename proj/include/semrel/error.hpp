#pragma once

#include <stdexcept>
#include <string>

namespace semrel {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  kConfig = 2,     // usage, missing resource, unreadable path
  kData = 3,       // malformed or inconsistent input files
  kNumerical = 4,  // solver failure, degenerate statistics
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace semrel
