#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stablesde {

// Argument outside the documented domain. `field` names the offending
// parameter so callers can report it without parsing the message.
class ParameterDomainError : public std::invalid_argument {
 public:
  ParameterDomainError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Requested integral does not converge for the given exponents.
class DivergentIntegralError : public std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical routine could not meet its tolerance. Carries the best
// estimate it reached and the error bound it could certify.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// A simulated path left the representable range (NaN/Inf state).
class SimulationDivergence : public std::runtime_error {
 public:
  SimulationDivergence(const std::string& what, std::size_t step_index)
      : std::runtime_error(what), step_index_(step_index) {}

  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::size_t step_index_;
};

// Too few usable samples to form the requested statistic.
class InsufficientDataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output path cannot be created or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Malformed or inconsistent run configuration. line == 0 means the
// problem is not tied to a specific input line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

}  // namespace stablesde
