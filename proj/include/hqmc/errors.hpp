// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hqmc {

// Operand dimensions disagree (multi-index vs. point, spec vs. point set, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested object would exceed a fixed size budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Numerical routine failed (non-finite integrand value, eigen-iteration, ...).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (JSON / CSV).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hqmc
