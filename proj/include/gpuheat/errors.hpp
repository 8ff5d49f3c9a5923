#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpuheat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter values supplied by the caller or a config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Reference to something that is not part of the model (e.g. unknown node id).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A kernel or classification request describing no work at all.
class EmptyWorkError : public Error {
 public:
  using Error::Error;
};

/// Illegal fragment state transition. Always a bug in the caller.
class SchedulerLogicError : public Error {
 public:
  using Error::Error;
};

class CatalogError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-physical state.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time_s)
      : Error(what), time_s_(time_s) {}
  double time_s() const noexcept { return time_s_; }

 private:
  double time_s_;
};

struct FieldError {
  std::string path;  // e.g. "orbit.eclipse_fraction"
  std::string message;
};

/// Every offending field of a scenario, collected before any stepping.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace gpuheat
