#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace star {

/// Malformed input stream. Carries the 1-based row/column where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Input parsed but its shape is inconsistent (dimension mismatch, empty grid).
class StructuralError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (out-of-bounds cell, negative weight).
class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Invalid mission or experiment configuration.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No traversable path connects start and goal.
class UnreachableError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace star
