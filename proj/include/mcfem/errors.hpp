#pragma once

#include <stdexcept>
#include <string>

namespace mcfem {

/// Bad argument or inconsistent input to a library call.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear solve failed or its residual check did not hold.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double diagnostic)
      : std::runtime_error(what), diagnostic_(diagnostic) {}

  /// Reciprocal pivot ratio, residual ratio or similar, depending on the site.
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

/// A closed-form expression was evaluated outside the range where it holds.
class OutOfValidity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Transfer-function normalisation divides by (Pe - 1).
class SingularNormalization : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bivariate analysis only handles separable denominators.
class UnsupportedStructure : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace mcfem
