#ifndef EPIREP_ERRORS_HPP
#define EPIREP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epirep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter values violating the model's admissible set.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Valid parameters for which a closed form is undefined (e.g. beta_p = 0).
class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

/// Parameters sitting exactly on a regime boundary where no verdict is given.
class BoundaryCase : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size collapsed below the underflow threshold.
class StiffnessError : public NumericalError {
 public:
  StiffnessError(const std::string& what, double time) : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Newton correction along a continuation branch failed to reduce the residual.
class BranchTraceError : public NumericalError {
 public:
  BranchTraceError(const std::string& what, double gamma) : NumericalError(what), gamma_(gamma) {}
  double gamma() const noexcept { return gamma_; }

 private:
  double gamma_;
};

}  // namespace epirep

#endif  // EPIREP_ERRORS_HPP
