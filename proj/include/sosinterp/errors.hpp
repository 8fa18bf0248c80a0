#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sosinterp {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad sizes, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Rootfinding was asked for the zeros of an identically-zero interpolant.
class ZeroPolynomialError : public Error {
 public:
  ZeroPolynomialError() : Error("interpolant is identically zero; its zero set is the whole interval") {}
};

/// Adaptive interpolation hit its grid-size cap without meeting the tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Thin QR found a numerically dependent column.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::ptrdiff_t column, double ratio)
      : Error("basis column " + std::to_string(column) + " is numerically dependent (|R_ii|/max|R_jj| = " +
              std::to_string(ratio) + ")"),
        column_(column) {}
  std::ptrdiff_t column() const noexcept { return column_; }

 private:
  std::ptrdiff_t column_;
};

/// Malformed SDPA input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sosinterp
