#pragma once

#include <stdexcept>
#include <string>

namespace levyrkhs {

/// Invalid or inconsistent configuration (bad mesh ratios, CFL violation, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical blow-up detected while integrating the density equation.
class InstabilityError : public std::runtime_error {
public:
  explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Regression-system assembly failed (degenerate data, shape mismatch, ...).
class AssemblyError : public std::runtime_error {
public:
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Matrix decomposition could not be computed.
class DecompositionError : public std::runtime_error {
public:
  explicit DecompositionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Linear solve failed (singular or numerically unusable system).
class SolveError : public std::runtime_error {
public:
  explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace levyrkhs
