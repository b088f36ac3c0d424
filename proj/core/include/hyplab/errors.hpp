#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

// Argument outside the mathematical domain of an operation (negative radius,
// negative heat time, s <= s_c, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration: grid size, exponent ordering, mismatched trajectories.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A spectral function evaluated to a non-finite value on some eigenvalue.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::size_t index, double eigenvalue)
      : std::runtime_error(what), index_(index), eigenvalue_(eigenvalue) {}

  std::size_t index() const noexcept { return index_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::size_t index_;
  double eigenvalue_;
};

// Eigensolver did not converge or produced eigenpairs with large residuals.
class EigensolverError : public std::runtime_error {
 public:
  EigensolverError(const std::string& what, double max_residual)
      : std::runtime_error(what), max_residual_(max_residual) {}

  double max_residual() const noexcept { return max_residual_; }

 private:
  double max_residual_;
};

// Scaling study could not collect enough usable points.
class StudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyplab
