#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omi {

// Root of every error this library throws.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

// g1 = g2 = 0 leaves the bright/dark transform undefined.
class DegenerateTransformError : public DomainError {
  public:
    using DomainError::DomainError;
};

// Time or index outside the valid range of a sequence or trace.
class RangeError : public Error {
  public:
    using Error::Error;
};

// Invalid run configuration. `path()` names the offending field, e.g.
// "system.drives[1].C".
class ConfigError : public Error {
  public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

// File could not be read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

// Base for failures of the numerics (exit code 3 in the CLI).
class NumericalError : public Error {
  public:
    using Error::Error;
};

class StabilityError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
  public:
    DivergenceError(double t, const std::string& what) : NumericalError(what), time_(t) {}
    double time() const noexcept { return time_; }

  private:
    double time_;
};

// The adiabatic oracle was asked to run outside its regime of validity.
class ApplicabilityError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Demodulation offset not resolved by the sampling interval.
class SamplingError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Fitted decay rate is not positive (data does not decay).
class FitRejectedError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class FitNotConvergedError : public NumericalError {
  public:
    FitNotConvergedError(const std::string& what, std::vector<double> residual_history)
        : NumericalError(what), history_(std::move(residual_history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

  private:
    std::vector<double> history_;
};

// Too few or too clustered sample points for a least-squares fit.
class RankError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace omi
