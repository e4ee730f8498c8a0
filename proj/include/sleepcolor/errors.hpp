#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sleepcolor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph or coloring instance violates a structural requirement.
class InstanceError : public Error {
 public:
  explicit InstanceError(const std::string& what) : Error("instance: " + what) {}
};

/// Malformed instance file. Carries the 1-based line number (0 when the
/// problem is not tied to a single line).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse: line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A node program did something the model forbids (e.g. messaging a non-neighbor).
class ProgramError : public Error {
 public:
  explicit ProgramError(const std::string& what) : Error("program: " + what) {}
};

/// An algorithmic invariant that holds on every admissible instance was broken.
class AlgorithmInvariantViolation : public Error {
 public:
  explicit AlgorithmInvariantViolation(const std::string& what)
      : Error("invariant: " + what) {}
};

class TooLargeForOracle : public Error {
 public:
  explicit TooLargeForOracle(const std::string& what) : Error("oracle: " + what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage: " + what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error("internal: " + what) {}
};

}  // namespace sleepcolor
