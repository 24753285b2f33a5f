#pragma once

#include <stdexcept>
#include <string>

namespace gibq {

// Computational failures map to CLI exit code 1, configuration failures to 2.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched lattices, horizons, arities or degrees.
class StructuralError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// A frequency outside the lattice cutoff was produced.
class OverflowError : public ComputationError {
 public:
  OverflowError(long long frequency, long long cutoff);
  long long frequency() const noexcept { return frequency_; }

 private:
  long long frequency_;
};

/// A materialisation guard (tree count, tuple budget, support size) was hit.
class CapacityError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// Parameter outside its admissible range.
class DomainError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// An iteration failed to contract, or a series failed to decay.
class DivergenceError : public ComputationError {
 public:
  DivergenceError(const std::string& what, double measured_factor);
  double measured_factor() const noexcept { return factor_; }

 private:
  double factor_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gibq
