#pragma once

#include <stdexcept>
#include <string>

namespace mcsubmod {

/// Bad arguments or violated preconditions.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix or distribution failed validation (stochasticity, support, shape).
class ValidationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method did not converge.
class ConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive search or enumeration would exceed its hard size guard.
class GuardError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mcsubmod
