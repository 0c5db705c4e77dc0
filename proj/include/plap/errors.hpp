#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: a violated type invariant, a malformed or unknown config key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a problem) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Base class for failures of a numerical procedure on valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Rayleigh quotient requested for a trial whose weighted integral vanishes.
class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The constraint set of the requested principal eigenvalue is empty.
class InfeasibleConstraint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SignChangeDetected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OracleFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeedCorrectionFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The inputs of a comparison check do not satisfy its hypotheses.
class InapplicableFixture : public Error {
 public:
  using Error::Error;
};

}  // namespace plap
