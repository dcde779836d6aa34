#pragma once

#include <stdexcept>
#include <string>

namespace kwe {

/// Process exit codes used by the command line tool.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  instability = 3,
  property_violation = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept = 0;
};

/// Invalid configuration: bad keys, out-of-range parameters, unknown names.
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

/// Precondition violated by a caller (grid mismatch, non-unit sigma, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

/// Non-finite values or budgets blown during time integration.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double time) : Error(what), time_(time) {}
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::instability; }
  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A structural property the numerics must honour was measured to fail
/// (non-contraction, nesting, sandwich, negativity).
class PropertyViolation : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::property_violation; }
};

}  // namespace kwe
