#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ntl {

/// Argument lies outside the set an operation is defined on (e.g. x outside a
/// subdomain closure).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model parameter violates a standing assumption (sp > 1, delta < delta_0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation requested in a parameter regime where it is not defined, e.g. the
/// nonlocal seminorm at delta = 0.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical failure inside a solver (indefinite system, no convergence,
/// line-search underflow).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration rejected; carries every violation found, not only the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace ntl
