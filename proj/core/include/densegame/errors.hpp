#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace densegame {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented invariant (hermiticity, normalization, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Family of operators does not pairwise commute.
class NonCommutingError : public Error {
 public:
  using Error::Error;
};

// Commuting family for which no acceptable common basis was produced.
class DiagonalizationError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Syntax error in a game file, with 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace densegame
