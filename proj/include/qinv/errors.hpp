#pragma once

#include <stdexcept>
#include <string>

namespace qinv {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel errors.
class SizingError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };

class SingularError : public Error {
 public:
  SingularError(const std::string& what, double pivot) : Error(what), pivot_(pivot) {}
  double pivot() const noexcept { return pivot_; }

 private:
  double pivot_;
};

// Domain errors: the request makes no sense for the given algebra or parameters.
class DomainError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };

/// No real transformation parameter exists (SU(2) with |2G/(w+W)| >= 1).
class RegimeError : public DomainError {
 public:
  RegimeError(const std::string& what, double ratio) : DomainError(what), ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

/// w + W = 0 with G != 0: the auxiliary condition degenerates.
class SingularConditionError : public DomainError { using DomainError::DomainError; };

// Numerical failures detected by internal consistency checks.
class ConsistencyError : public Error { using Error::Error; };
class AccuracyError : public Error { using Error::Error; };
class DivergenceError : public Error { using Error::Error; };
class FrameLeakageError : public Error { using Error::Error; };
class MetricError : public Error { using Error::Error; };

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field) : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace qinv
