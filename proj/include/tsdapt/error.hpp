#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsdapt {

enum class ErrorCode {
  InvalidArgument,
  DegenerateCovariance,
  NumericalFailure,
  InvalidWeights,
  MissingTargetClass,
  EmptyClass,
  InvalidLength,
  ParseError,
  ConfigError,
  InputError,
  OutputError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed embedding files. line is 1-based; 0 means "not tied to a line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tsdapt
