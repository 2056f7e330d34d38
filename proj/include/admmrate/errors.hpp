#pragma once

#include <stdexcept>
#include <string>

namespace admmrate {

// Parameter outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A matrix that must be invertible (or of full column rank) is not.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative proximal sub-solve did not reach its tolerance.
class InnerSolverError : public std::runtime_error {
 public:
  InnerSolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent numerical routes disagree beyond tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace admmrate
