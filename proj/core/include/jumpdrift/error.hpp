#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jumpdrift {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating a function or quadrature.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Cholesky pivot fell below the relative singularity threshold.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Data that cannot support the requested statistic (e.g. no sample inside I).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Euler recursion left the representable range.
class SimulationDiverged : public Error {
 public:
  static constexpr std::size_t kNoPath = static_cast<std::size_t>(-1);

  explicit SimulationDiverged(std::size_t step, std::size_t path = kNoPath)
      : Error(message(step, path)), step_(step), path_(path) {}

  std::size_t step() const noexcept { return step_; }
  std::size_t path() const noexcept { return path_; }

  SimulationDiverged with_path(std::size_t path) const { return SimulationDiverged(step_, path); }

 private:
  static std::string message(std::size_t step, std::size_t path) {
    std::string m = "simulation diverged at step " + std::to_string(step);
    if (path != kNoPath) m += " of path " + std::to_string(path);
    return m;
  }

  std::size_t step_;
  std::size_t path_;
};

}  // namespace jumpdrift
