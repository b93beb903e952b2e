#pragma once

#include <stdexcept>
#include <string>

namespace cssqkd {

/// Shapes of two operands do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A square matrix over GF(2) has no inverse.
class SingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A request exceeds a configured enumeration or register-size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A scalar argument lies outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Arguments are individually well formed but jointly inconsistent.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cssqkd
