#pragma once

#include <stdexcept>
#include <string>

namespace qpnls {

// Base of every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: dimension mismatch, out-of-range parameter, malformed config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Picard differences grew instead of shrinking.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

// Non-finite state in the reference integrator.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Operation exists but not for this input (polynomial profile constants, deep trees).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Branch violates the level structure of the branch sets.
class MalformedBranchError : public Error {
 public:
  using Error::Error;
};

// A run directory lacks a required artifact.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpnls
