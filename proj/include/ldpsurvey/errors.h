#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ldpsurvey {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data shapes: empty datasets, dimension
// mismatches, non-finite entries.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An argument violates an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed. Row and column are 1-based positions in
// the file (row 1 is the header); zero means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " +
              std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

// The iterative solver produced a non-finite objective.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, Eigen::VectorXd last_finite,
                int iteration)
      : Error(what),
        last_finite_(std::move(last_finite)),
        iteration_(iteration) {}

  const Eigen::VectorXd& last_finite_iterate() const { return last_finite_; }
  int iteration() const { return iteration_; }

 private:
  Eigen::VectorXd last_finite_;
  int iteration_;
};

// A validation source ran dry before the tester drew its budget.
class InsufficientValidationError : public Error {
 public:
  InsufficientValidationError(std::size_t needed, std::size_t available)
      : Error("validation source has " + std::to_string(available) +
              " samples, tester needs " + std::to_string(needed)),
        needed_(needed),
        available_(available) {}

  std::size_t needed() const { return needed_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t needed_;
  std::size_t available_;
};

}  // namespace ldpsurvey
