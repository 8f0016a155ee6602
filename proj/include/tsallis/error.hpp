#pragma once

#include <stdexcept>
#include <string>

namespace tsallis {

// Argument outside the mathematical domain of a function (x <= 0 for a log,
// y outside (-1/e, 0) for W_{-1}, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative solver hit its cap without meeting its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Malformed experiment configuration, parameter file or loss script.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested quantity is not defined for this environment (for instance a
// gap-based regret when the gaps are unknown).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tsallis
