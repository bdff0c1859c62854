#pragma once

#include <stdexcept>
#include <string>

namespace pma {

enum class ErrorKind {
  kDomain,
  kIntegrationDiverged,
  kObserverDiverged,
  kProxyDiverged,
  kSingularGain,
  kNoSolution,
  kInfeasibleGains,
  kExhaustedBudget,
  kInvalidConfig,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::kDomain, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kInvalidConfig, what) {}
};

/// A state went non-finite. `time()` is the simulation time of the step that failed.
class DivergedError : public Error {
 public:
  DivergedError(ErrorKind kind, double time, const std::string& what)
      : Error(kind, what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class SingularGainError : public Error {
 public:
  SingularGainError(double x, double xdot, double gain)
      : Error(ErrorKind::kSingularGain,
              "input gain b(x, xdot) = " + std::to_string(gain) +
                  " below floor at x=" + std::to_string(x) +
                  ", xdot=" + std::to_string(xdot)),
        x_(x),
        xdot_(xdot) {}

  double x() const noexcept { return x_; }
  double xdot() const noexcept { return xdot_; }

 private:
  double x_;
  double xdot_;
};

}  // namespace pma
