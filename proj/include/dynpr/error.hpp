#pragma once

#include <cstddef>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dynpr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  DimensionError(std::string_view what, std::size_t expected, std::size_t got)
      : Error(std::string(what) + ": expected length " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

/// Input data violates a documented precondition (bad ids, negative counts,
/// unnormalized vectors, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parameters are inconsistent with each other or with the data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Raised by the static solver when max_iter is exhausted. Carries the last
/// iterate so callers can still inspect it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::vector<double> last, double residual, std::size_t iterations)
      : Error("no convergence after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        last_(std::move(last)),
        residual_(residual),
        iterations_(iterations) {}

  const std::vector<double>& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> last_;
  double residual_;
  std::size_t iterations_;
};

// Warnings go through a replaceable sink so tests can capture them.
using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
  return sink;
}

inline void warn(std::string_view msg) {
  if (warning_sink()) warning_sink()(msg);
}

}  // namespace dynpr
