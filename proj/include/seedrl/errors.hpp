#pragma once

#include <stdexcept>
#include <string>

namespace seedrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input value outside the support of the operation (non-finite reward, r <= 0 under a lognormal model).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An observation that no hypothesis of a finite-scenario belief can explain.
class ModelMismatch : public Error {
 public:
  using Error::Error;
};

/// Matrix not symmetric, not PSD, or a singular system.
class NumericDomain : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidAction : public Error {
 public:
  using Error::Error;
};

/// Planning requested from an absorbing state or with no steps left.
class NoAction : public Error {
 public:
  using Error::Error;
};

/// Sampled model violates its invariants (transition rows not stochastic, bad prior).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Bad experiment configuration: unknown preset/strategy, malformed override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seedrl
