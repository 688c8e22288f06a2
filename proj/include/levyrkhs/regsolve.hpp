#pragma once

#include <Eigen/Dense>

namespace levyrkhs {

/// Generalized SVD of a pair (A, K):
///   A = U * diag(sigma) * Xinv,   K = V * diag(mu) * Xinv,
/// with U, V column-orthonormal, sigma_i^2 + mu_i^2 == 1 and Xinv the
/// pseudo-inverse of X.  p is the numerical rank of the stacked pair [A; K];
/// rank-deficient pairs are truncated to p columns.
struct GsvdFactors {
  Eigen::MatrixXd U;      // m x p
  Eigen::MatrixXd V;      // n x p
  Eigen::MatrixXd X;      // n x p, full column rank
  Eigen::MatrixXd Xinv;   // p x n == pinv(X)
  Eigen::VectorXd sigma;  // p
  Eigen::VectorXd mu;     // p

  int rank() const { return static_cast<int>(sigma.size()); }
};

/// QR/CS route: QR-factor the stacked (m+n) x n matrix, SVD its triangular
/// factor for rank truncation (relative threshold 1e-12), split the
/// orthonormal factor, SVD the top block and back-substitute for X.
/// Requires a nonzero K; throws DecompositionError for numerically rank-zero
/// input or when the pair rank exceeds the row count of A.
GsvdFactors gsvd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& K);

/// Symmetric PSD square root by eigendecomposition; eigenvalues below
/// 1e-12 * lambda_max clamp to zero, an eigenvalue below -1e-8 * lambda_max
/// raises SolveError (input not PSD).  Input must be symmetric to 1e-10
/// relative.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& G);

struct TikhonovSolution {
  Eigen::VectorXd c;
  double lambda = 0.0;
  double residual_norm = 0.0;  // ||A c - f||
  double penalty_norm = 0.0;   // ||K c|| (root of the penalty quadratic)
};

/// Minimizer of ||A c - f||^2 + lambda ||K c||^2 through the filter factors
/// sigma_i / (sigma_i^2 + lambda mu_i^2); requires lambda > 0.
TikhonovSolution tikhonov_solve(const GsvdFactors& fac, const Eigen::VectorXd& f, double lambda);

/// Same minimizer via the regularized normal equations (A^T A + lambda K^T K)
/// and a dense symmetric factorization; the oracle for tikhonov_solve.
/// Throws SolveError when the normal matrix is singular.
TikhonovSolution direct_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& K,
                              const Eigen::VectorXd& f, double lambda);

}  // namespace levyrkhs
