#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace levyrkhs {

/// Spatial setup shared by generators and the regression assembly.
///
/// The state domain is Omega = [-half_width, half_width]; the jump density is
/// supported on (0, support_radius]; dx is the observation mesh.  The interior
/// region [-half_width + support_radius, half_width - support_radius] is where
/// the nonlocal operator can be evaluated without leaving Omega.
struct ProblemDomain {
  double half_width = 5.0;      // L
  double support_radius = 2.0;  // R0
  double dx = 0.01;             // observation mesh

  double interior_min() const { return -half_width + support_radius; }
  double interior_max() const { return half_width - support_radius; }

  /// Throws ConfigError unless R0 < L, dx > 0, R0/dx >= 2 and the interior
  /// region is nonempty.
  void validate() const;
};

/// Piecewise-linear table on a strictly increasing grid.  Evaluation outside
/// the grid throws std::domain_error (no extrapolation).
struct TabulatedFn {
  std::vector<double> grid;
  std::vector<double> values;

  double operator()(double x) const;
};

struct LinearDrift {
  double slope = -0.5;
};
struct SineDrift {};

using DriftSpec = std::variant<LinearDrift, SineDrift, TabulatedFn>;

/// b(x) for the given drift specification.
double eval_drift(const DriftSpec& spec, double x);

struct GaussianDecay {};     // phi(y) = exp(-y^2)
struct ExponentialDecay {};  // phi(y) = exp(-2|y|)

using LevyDensitySpec = std::variant<GaussianDecay, ExponentialDecay, TabulatedFn>;

/// phi(|r|); symmetric by construction, nonnegative for the built-in variants.
double eval_levy_density(const LevyDensitySpec& spec, double r);

struct NormalJumps {
  double mean = 0.0;
  double stddev = 1.0;
};
struct LaplaceJumps {
  double location = 0.0;
  double scale = 1.0;
};

/// Compound-Poisson description matching a jump density: arrival intensity
/// rate = integral of phi, plus the normalized jump-size law.
struct JumpLaw {
  double rate = 1.0;
  std::variant<NormalJumps, LaplaceJumps> sampler;
};

/// The jump law paired with each closed-form density:
///   GaussianDecay    -> rate sqrt(pi), jumps N(0, 1/2)
///   ExponentialDecay -> rate 1,       jumps Laplace(0, 1/2)
/// Tabulated densities have no built-in law; throws std::invalid_argument.
JumpLaw jump_law_for(const LevyDensitySpec& spec);

}  // namespace levyrkhs
