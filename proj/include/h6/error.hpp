#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace h6 {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(const std::string& symbol)
      : Error("unknown symbol '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Evaluation left the domain of an operation (log of a non-positive
/// number, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A symbol is known but not admissible in the requested construction.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// A rational Casimir was evaluated too close to its pole.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace h6
