#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdlrt {

// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise malformed input data.
class InvalidData : public Error {
public:
  using Error::Error;
};

// A column with zero variance where a correlation is required.
class DegenerateColumn : public Error {
public:
  using Error::Error;
};

// Cholesky pivot breakdown: the matrix is numerically rank deficient.
class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

// Argument outside a function's mathematical domain.
class DomainError : public Error {
public:
  using Error::Error;
};

// Shape outside the sample-size condition of a limit theorem.
class TheoremDomainError : public DomainError {
public:
  using DomainError::DomainError;
};

// Block partition inconsistent with the data dimension (or k < 2).
class PartitionMismatch : public Error {
public:
  using Error::Error;
};

// A group sample too small for the requested statistic.
class GroupTooSmall : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// An iteration limit was exhausted before convergence.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

// Malformed text input; carries a 1-based row/column location.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t row, std::size_t column)
      : Error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

// Scenario/config file problem; carries a 1-based line number.
class ConfigError : public Error {
public:
  ConfigError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace hdlrt
