#pragma once

#include <stdexcept>
#include <string>

namespace sarmruin {

/// Base for all library errors. The C API maps each subclass to a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (u outside (0,1), x < x_m, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Sarmanov model violates one of its defining constraints.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis (e.g. E[Y^alpha] < 1) does not hold for the model.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Quadrature non-convergence, rejection-sampler starvation and the like.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree did not.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment file or unknown catalog entry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sarmruin
