#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

// Error taxonomy mirrors the CLI exit codes: parse(2), domain(3),
// convergence(4), divergence(5).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, double best_residual)
      : std::runtime_error(msg), best_residual(best_residual) {}
  double best_residual = 0.0;
};

class TrainingDivergence : public std::runtime_error {
 public:
  explicit TrainingDivergence(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spectra
