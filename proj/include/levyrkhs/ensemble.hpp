#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "levyrkhs/dataset.hpp"
#include "levyrkhs/model.hpp"

namespace levyrkhs {

struct EnsembleConfig {
  std::size_t n_paths = 100000;  // J
  double dt = 0.05;
  double horizon = 5.0;  // T; T/dt must be a positive integer
  std::uint64_t seed = 0;
  JumpLaw jump;
  DriftSpec drift = LinearDrift{0.0};

  void validate() const;
  int n_steps() const;
};

struct KdeConfig {
  double bandwidth_constant = 0.5;  // c in h = c (J dt^2)^(-1/5)
  std::vector<double> grid;
  int smoothing_window = 11;  // w, odd, > order
  int smoothing_order = 3;    // q

  double bandwidth(std::size_t n_paths, double dt) const;
  void validate() const;
};

/// Euler steps X_{k+1} = X_k + b(X_k) dt + sum of Poisson(rate*dt) jumps drawn
/// from the jump sampler; no Brownian term.  Row i holds all paths at time
/// i*dt (row 0 is all zeros).  Deterministic given the seed, independent of
/// thread count (one RNG stream per path).
Eigen::MatrixXd simulate_ensemble(const EnsembleConfig& cfg);

/// Gaussian-kernel density estimate (1/(Jh)) sum_j K((x - X_j)/h) at each
/// grid node.  Kernel tails beyond 8.5 bandwidths are dropped (below 2e-16
/// of the peak).
std::vector<double> kde_density(std::span<const double> samples, std::span<const double> grid,
                                double bandwidth);

/// Savitzky-Golay filter: each output is the least-squares polynomial of
/// degree `order` over the centred window, evaluated at the centre; the first
/// and last half-windows are fitted one-sidedly over the first/last `window`
/// points.  Reproduces polynomials of degree <= order exactly.
/// Throws std::invalid_argument for even window, window <= order, or input
/// shorter than the window.
std::vector<double> savgol_smooth(std::span<const double> values, int window, int order);

struct KdeBuildInfo {
  double bandwidth = 0.0;
  long clamped_negative_values = 0;
};

/// Simulates the ensemble, applies KDE at every observation time, smooths
/// each snapshot in x and clamps negatives to zero.  Paths are processed in
/// blocks so the full sample matrix never needs to be held for large J.
DensityDataset build_kde_dataset(const EnsembleConfig& cfg, const KdeConfig& kde,
                                 KdeBuildInfo* info = nullptr);

/// Raw samples as binary 64-bit floats, row-major [time][path].
void dump_samples(const Eigen::MatrixXd& samples, const std::string& path);

}  // namespace levyrkhs
