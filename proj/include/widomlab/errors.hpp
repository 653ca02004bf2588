#pragma once

#include <stdexcept>
#include <string>

namespace widomlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method exhausted its budget before meeting its target.
class NonConvergence : public Error {
public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Weight with a non-integer negative exponent on [-1,1]; only the
/// asymptotic predictor can handle it.
class UnsupportedWeight : public Error {
public:
  using Error::Error;
};

/// Fewer distinct points than the requested degree + 1.
class DegenerateSet : public Error {
public:
  using Error::Error;
};

class Unsupported : public Error {
public:
  using Error::Error;
};

/// Malformed experiment configuration (maps to CLI exit code 2).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace widomlab
