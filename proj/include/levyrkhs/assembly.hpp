#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "levyrkhs/dataset.hpp"
#include "levyrkhs/model.hpp"

namespace levyrkhs {

/// The discrete inverse problem assembled from a density dataset.
///
/// Row (i, j) of Q corresponds to snapshot i and interior node j and holds
/// sqrt(dx/N) * (p(x_j + r_k) + p(x_j - r_k) - 2 p(x_j)) in column k; f holds
/// the matching sqrt(dx/N)-scaled finite-difference right-hand side.  rho_hat
/// is the exploration density on the r grid (sum_k rho_hat[k]*dr == 1) and
/// Gbar the exploration-normalized kernel matrix Q^T Q ./ (rho rho^T).
/// r-grid entries whose exploration weight vanished are dropped and recorded.
struct RegressionSystem {
  std::vector<double> r_grid;  // r_k = k*dx, zero-exploration entries removed
  double dr = 0.0;
  Eigen::MatrixXd Q;       // (N*M) x n
  Eigen::VectorXd f;       // N*M
  Eigen::VectorXd rho_hat;  // n
  double Z = 0.0;          // exploration normalization constant
  Eigen::MatrixXd Gbar;    // n x n, symmetric PSD
  int n_snapshots = 0;     // N
  int n_interior = 0;      // M
  std::vector<double> interior_x;
  std::vector<int> snapshot_rows;        // dataset row backing each snapshot
  std::vector<int> dropped_r_indices;    // 0-based indices of removed r_k

  int n_basis() const { return static_cast<int>(r_grid.size()); }
  int row_index(int snapshot, int interior) const { return snapshot * n_interior + interior; }

  /// Design matrix of the least-squares form: A = Q * Gbar * dr.
  Eigen::MatrixXd design_matrix() const { return Q * Gbar * dr; }
};

/// Training/validation row blocks over snapshot index sets; the exploration
/// weights and kernel stay shared with the full system.
struct SystemSplit {
  std::shared_ptr<const RegressionSystem> full;
  std::vector<int> train_snapshots;
  std::vector<int> valid_snapshots;
  Eigen::MatrixXd Q_train, Q_valid;
  Eigen::VectorXd f_train, f_valid;
  Eigen::MatrixXd A_train, A_valid;  // cached Q_block * Gbar * dr

  const Eigen::MatrixXd& gbar() const { return full->Gbar; }
  double dr() const { return full->dr; }
};

enum class SplitPolicy { Interleave };

struct AssembleOptions {
  /// First dataset snapshot used (KDE pipelines skip the degenerate t = 0
  /// row); -1 keeps everything available.
  int first_snapshot = 0;
  /// Constant diffusion coefficient sigma of the generating dynamics; the
  /// right-hand side subtracts (sigma^2/2) d^2p/dx^2.  The density-equation
  /// generator has sigma = 1; compound-Poisson ensembles have sigma = 0.
  double diffusion_sigma = 1.0;
};

/// Eq-style right-hand side over the interior nodes: forward time difference
/// plus centred d/dx(b p) minus one half the centred second difference of p;
/// the two interior endpoints use the one-sided O(dx^2) stencils.  Row i of
/// the result corresponds to snapshot row snapshot_rows[i].
Eigen::MatrixXd compute_f_tilde(const DensityDataset& ds, const DriftSpec& drift,
                                const ProblemDomain& domain, const AssembleOptions& opt = {});

struct QParts {
  Eigen::MatrixXd scaled;  // sqrt(dx/N)-scaled Q, (N*M) x n
  Eigen::MatrixXd raw;     // unscaled second differences
  std::vector<double> r_grid;
  std::vector<int> interior_indices;  // indices into ds.x_grid
  std::vector<int> snapshot_rows;
};

QParts build_q(const DensityDataset& ds, const ProblemDomain& domain,
               const AssembleOptions& opt = {});

/// Exploration weights rho_hat(r_k) = (1/(Z N)) sum_{i,j} |Q_raw| dx with Z
/// normalizing sum_k rho_hat(r_k) dx to 1.  Throws AssemblyError when every
/// entry of Q vanishes ("data explores nothing").
std::pair<Eigen::VectorXd, double> build_rho_hat(const Eigen::MatrixXd& raw_q, int n_snapshots,
                                                 double dx);

struct KernelParts {
  Eigen::MatrixXd Gbar;          // over kept indices only
  std::vector<int> kept_indices;
};

/// Gbar(k,l) = (Q^T Q)(k,l) / (rho_k rho_l); indices with zero exploration are
/// removed and reported through kept_indices.
KernelParts build_kernel(const Eigen::MatrixXd& scaled_q, const Eigen::VectorXd& rho_hat);

RegressionSystem assemble(const DensityDataset& ds, const DriftSpec& drift,
                          const ProblemDomain& domain, const AssembleOptions& opt = {});

/// Interleaved split: even snapshot positions train, odd validate.  Requires
/// at least two snapshots.
SystemSplit split_train_valid(std::shared_ptr<const RegressionSystem> sys,
                              SplitPolicy policy = SplitPolicy::Interleave);

}  // namespace levyrkhs
