#pragma once

// Error types shared across the library. Contract violations use
// std::invalid_argument directly; the types below carry extra context
// that callers (CLI exit codes, diagnostics) need.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curveform {

/// A matrix required to be full rank was numerically rank deficient.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}

  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

/// The interaction graph lacks a spanning tree rooted at the leader.
class NoSpanningTreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration produced a non-finite state.
class NumericalAbortError : public std::runtime_error {
 public:
  NumericalAbortError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Malformed input file; carries the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace curveform
