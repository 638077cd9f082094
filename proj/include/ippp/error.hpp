// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ippp {

/// Base of every error raised by the library. The CLI maps these to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression language ---------------------------------------------------------

class PositionedError : public Error {
 public:
  PositionedError(std::size_t position, const std::string& what)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class LexError : public PositionedError {
 public:
  LexError(std::size_t position, std::string message)
      : PositionedError(position, "lex error: " + message), message_(std::move(message)) {}
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
};

class ParseError : public PositionedError {
 public:
  ParseError(std::size_t position, std::string expected)
      : PositionedError(position, "parse error: expected " + expected), expected_(std::move(expected)) {}
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::string expected_;
};

class UnknownFunction : public PositionedError {
 public:
  UnknownFunction(std::size_t position, const std::string& name)
      : PositionedError(position, "unknown function '" + name + "'") {}
};

class UnknownVariable : public PositionedError {
 public:
  UnknownVariable(std::size_t position, const std::string& name)
      : PositionedError(position, "unknown variable '" + name + "'") {}
};

class EvalError : public PositionedError {
 public:
  EvalError(std::size_t position, std::string cause)
      : PositionedError(position, "evaluation error: " + cause), cause_(std::move(cause)) {}
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string cause_;
};

// Rate model -----------------------------------------------------------------

class InvalidInterval : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NegativeRate : public Error {
 public:
  NegativeRate(double x, double value)
      : Error("negative rate r(" + std::to_string(x) + ") = " + std::to_string(value)), x_(x), value_(value) {}
  double x() const noexcept { return x_; }
  double value() const noexcept { return value_; }

 private:
  double x_;
  double value_;
};

class DomainViolation : public Error {
 public:
  explicit DomainViolation(double x)
      : Error("x = " + std::to_string(x) + " lies outside the rate domain"), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

class BoundViolation : public Error {
 public:
  BoundViolation(double x, double value, double bound)
      : Error("r(" + std::to_string(x) + ") = " + std::to_string(value) + " exceeds declared bound " +
              std::to_string(bound)) {}
};

// Quadrature / inversion -----------------------------------------------------

class ToleranceNotMet : public Error {
 public:
  explicit ToleranceNotMet(double achieved)
      : Error("integration tolerance not met; achieved error estimate " + std::to_string(achieved)),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class OutOfRange : public Error {
 public:
  OutOfRange(double y, double limit)
      : Error("cumulative intensity value " + std::to_string(y) + " is not reachable (limit " +
              std::to_string(limit) + ")"),
        y_(y), limit_(limit) {}
  double y() const noexcept { return y_; }
  /// The reachable extreme of R in the requested direction (sup R for y above the range).
  double limit() const noexcept { return limit_; }

 private:
  double y_;
  double limit_;
};

// Random variates ------------------------------------------------------------

class InvalidRate : public Error {
 public:
  using Error::Error;
};
class InvalidShape : public Error {
 public:
  using Error::Error;
};
class InvalidMean : public Error {
 public:
  using Error::Error;
};

// Sampling -------------------------------------------------------------------

class ZeroRate : public Error {
 public:
  using Error::Error;
};
class NonTermination : public Error {
 public:
  using Error::Error;
};
class ZeroMass : public Error {
 public:
  using Error::Error;
};
class InvalidIndex : public Error {
 public:
  using Error::Error;
};

}  // namespace ippp
