#pragma once

#include <vector>

#include "levyrkhs/dataset.hpp"
#include "levyrkhs/model.hpp"

namespace levyrkhs {

/// Which spacing the stored companion rows use for forward time differences.
/// Observation: companions are the next stored snapshot (spacing horizon/N).
/// Solver: companions are taken one solver step after each snapshot.
enum class TimeDifferenceMode { Observation, Solver };

struct FpeConfig {
  ProblemDomain domain;
  double solver_dx = 0.005;   // solver mesh, also the r quadrature step
  double solver_dt = 2.5e-5;  // requested step; rounded down to divide horizon/N
  double horizon = 1.0;       // T
  int n_snapshots = 30;       // N
  double ic_std = 0.5;        // std of the default Gaussian initial density
  std::vector<double> initial_condition;  // on the solver grid; empty -> default
  // Solver-step companions keep the finite-difference data consistent with
  // the generating scheme (the observation spacing incurs an O(dt_obs) model
  // error that dominates everything else).
  TimeDifferenceMode time_difference = TimeDifferenceMode::Solver;

  /// Throws ConfigError on CFL violation (solver_dt > solver_dx^2), a
  /// non-integer dx/solver_dx ratio, or an initial condition whose solver-grid
  /// Riemann sum deviates from 1 by more than 1e-10.
  void validate() const;

  /// Step actually taken: dt_obs / ceil(dt_obs / solver_dt), so snapshots land
  /// exactly on solver steps.
  double effective_dt() const;
  int steps_per_snapshot() const;
};

/// Solver-grid x nodes: -L + j*solver_dx.
std::vector<double> fpe_solver_grid(const FpeConfig& cfg);

/// Standard-normal-shaped density N(0, ic_std^2), renormalized on the grid.
std::vector<double> default_initial_condition(const FpeConfig& cfg);

/// Integrates the nonlocal density equation with forward Euler in time,
/// central differences for drift/diffusion and a Riemann-sum jump term that is
/// evaluated only inside the interior region (zero outside); values beyond the
/// grid ends are treated as zero.  Returns N+1 rows at times i*T/N on the
/// solver grid; in Solver mode a companion matrix one solver step after each
/// row is attached.  Throws InstabilityError if any value drops below -1e-8.
DensityDataset solve_fpe_native(const DriftSpec& drift, const LevyDensitySpec& levy,
                                const FpeConfig& cfg);

/// solve_fpe_native subsampled to the observation mesh cfg.domain.dx.
DensityDataset solve_fpe(const DriftSpec& drift, const LevyDensitySpec& levy,
                         const FpeConfig& cfg);

}  // namespace levyrkhs
