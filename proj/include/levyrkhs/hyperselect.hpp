#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyrkhs/assembly.hpp"
#include "levyrkhs/regsolve.hpp"

namespace levyrkhs {

/// Regularization norms of the bilevel study, realized as PSD roots K so the
/// penalty is ||K c||^2:
///   Rkhs      c^T Gbar c                     (K = sqrt(Gbar))
///   L2Rho     c^T Gbar diag(dr rho) Gbar c   (K = sqrt of that form)
///   Euclidean c^T c                          (K = I)
enum class PenaltyNormKind { Rkhs, L2Rho, Euclidean };

std::string penalty_norm_name(PenaltyNormKind kind);

Eigen::MatrixXd penalty_root(PenaltyNormKind kind, const RegressionSystem& sys);

struct BilevelConfig {
  double eta0 = 0.004;     // initial learning rate
  double momentum = 0.99;  // iota in [0, 1)
  int max_iters = 300;     // K
  double grad_eps = 1e-8;  // epsilon in the gradient normalization
  int stop_window = 20;    // W
  double tol_gamma = 1e-4;  // epsilon_gamma
  double tol_loss = 1e-8;   // epsilon_F
  double gamma0 = 0.0;
  double v0 = 0.0;
};

struct BilevelRecord {
  int k = 0;
  double gamma = 0.0;  // gamma_k before this iteration's update
  double loss = 0.0;   // validation loss at the evaluated (look-ahead) point
  double v = 0.0;      // momentum entering the iteration
  double grad = 0.0;   // hypergradient at the look-ahead point
};

enum class StopReason { ConvergedWindow, MaxIters };

struct BilevelTrace {
  std::vector<BilevelRecord> records;
  StopReason stop_reason = StopReason::MaxIters;
};

/// Optimizer diverged (non-finite loss, gradient or gamma); carries the
/// partial trace for inspection.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& msg, BilevelTrace trace)
      : std::runtime_error(msg), trace(std::move(trace)) {}
  BilevelTrace trace;
};

/// One (split, norm) instance of the two-level problem.  The GSVD of
/// (A_train, K) is computed once at construction; every lower-level solve is
/// a filter application.
class TikhonovProblem {
public:
  TikhonovProblem(const SystemSplit& split, PenaltyNormKind norm);

  /// Lower level: c(gamma) minimizing ||A_L c - f_L||^2 + 10^gamma ||K c||^2.
  TikhonovSolution lower_solve(double gamma) const;

  /// Upper level: ||A_U c - f_U||^2.
  double upper_loss(const Eigen::VectorXd& c) const;

  /// dF/dgamma at (gamma, c(gamma)) through the implicit function theorem;
  /// the inverse Hessian is applied via the cached GSVD.
  double hypergradient(double gamma, const Eigen::VectorXd& c) const;

  const GsvdFactors& factors() const { return factors_; }
  Eigen::Index train_rows() const { return A_train_.rows(); }
  PenaltyNormKind norm() const { return norm_; }

private:
  PenaltyNormKind norm_;
  Eigen::MatrixXd A_train_, A_valid_;
  Eigen::VectorXd f_train_, f_valid_;
  Eigen::MatrixXd penalty_gram_;  // K^T K
  GsvdFactors factors_;
};

struct BilevelResult {
  double lambda = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd c;
  BilevelTrace trace;
};

/// Algorithm: Nesterov-style momentum on gamma with normalized look-ahead
/// hypergradients and learning rate eta0/sqrt(k); stops at the first k >= W
/// whose trailing window has |dgamma| < tol_gamma and |dF| < tol_loss, else
/// at max_iters.
BilevelResult bilevel_optimize(const SystemSplit& split, PenaltyNormKind norm,
                               const BilevelConfig& cfg = {});

struct SelectionResult {
  double lambda = 0.0;
  Eigen::VectorXd c;
  std::vector<double> lambda_grid;
  std::vector<double> criterion;  // curvature (L-curve) or GCV value per grid point
  bool lcurve_fell_back_to_gcv = false;
};

/// 141 log-spaced values covering 1e-12 .. 1e2.
std::vector<double> default_lambda_grid();

/// Maximum-curvature corner of (log residual, log penalty) on the training
/// block, curvature by three-point differences; ties break toward larger
/// lambda.  A degenerate flat curve falls back to gcv_select with a warning.
SelectionResult lcurve_select(const SystemSplit& split, PenaltyNormKind norm,
                              std::span<const double> lambda_grid);

/// Minimizes ||A_L c - f_L||^2 / (m - sum_i sigma_i^2/(sigma_i^2 + lambda
/// mu_i^2))^2; grid points with nonpositive denominator are skipped; ties
/// break toward larger lambda.
SelectionResult gcv_select(const SystemSplit& split, PenaltyNormKind norm,
                           std::span<const double> lambda_grid);

}  // namespace levyrkhs
