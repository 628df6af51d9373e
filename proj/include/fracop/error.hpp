#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration.
class ParamError : public Error {
 public:
  using Error::Error;
};

// Inputs outside an operation's domain (singular points, grid mismatch).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite samples or failed refinement studies.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);

}  // namespace fracop
