#pragma once

#include <stdexcept>
#include <string>

namespace razavy {

// Argument or record violates a documented precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input lies outside the region where an expansion or evaluation is valid.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation would overflow double range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Bracketing, integration or root-finding broke down.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested grid or run configuration cannot be satisfied.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value claimed to be an eigenvalue is not one.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace razavy
