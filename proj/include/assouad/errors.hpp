#pragma once

#include <stdexcept>
#include <string>

namespace assouad {

/// Base of every library error. `exit_code` is the CLI status the error maps to.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

// Precondition / domain violations: exit 2.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, 2) {}
};

class NormalizationError : public DomainError {
 public:
  using DomainError::DomainError;
};

class StructuralError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Precision / calibration failures: exit 3.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double achievable_bound)
      : Error(what, 3), bound_(achievable_bound) {}
  double achievable_bound() const noexcept { return bound_; }

 private:
  double bound_;
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& what) : Error(what, 3) {}
};

/// Raised by the KRS builder when a node cannot be cut at the given s.
class ConstructionError : public CalibrationError {
 public:
  using CalibrationError::CalibrationError;
};

// Classification that the audited range cannot settle: exit 4.
class InconclusiveError : public Error {
 public:
  explicit InconclusiveError(const std::string& what) : Error(what, 4) {}
};

}  // namespace assouad
