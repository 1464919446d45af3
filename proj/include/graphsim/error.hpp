#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphsim {

// Base for every error the library raises. The CLI maps InputError (and its
// subclasses) to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, malformed lines, unknown labels.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  // Same error attributed to a named source, e.g. "g.txt:4: ...".
  ParseError(const std::string& source, const ParseError& inner)
      : InputError(source + ":" + std::to_string(inner.line()) + ": " + inner.detail()),
        line_(inner.line()),
        detail_(inner.detail()) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Argument outside the mathematical domain of a function (e.g. L_N(0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A structure, model or transformation violates one of its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double worst_residual)
      : Error(what), worst_residual_(worst_residual) {}

  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

}  // namespace graphsim
