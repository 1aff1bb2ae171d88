#pragma once

#include <stdexcept>
#include <string>

namespace adnorm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON shape, missing keys, unreadable file).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition or invalid parameter.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver non-convergence, bracket failure, optimizer stagnation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A constructed object failed one of its certified invariants.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

inline void require_same_dim(long a, long b, const char* where) {
  if (a != b) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace adnorm
