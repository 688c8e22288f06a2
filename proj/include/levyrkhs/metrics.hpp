#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levyrkhs/assembly.hpp"

namespace levyrkhs {

/// Estimator values on the r grid: phi_hat = Gbar * c.
Eigen::VectorXd eval_phi(const RegressionSystem& sys, const Eigen::VectorXd& c);

struct L2RhoError {
  double absolute = 0.0;
  double relative = 0.0;
};

/// Exploration-weighted error sqrt(sum_k dr rho_k (phi_hat_k - phi_true_k)^2)
/// and its ratio to the weighted norm of phi_true.  Throws std::domain_error
/// when phi_true has zero weighted norm (relative error undefined).
L2RhoError l2rho_error(std::span<const double> phi_hat, std::span<const double> phi_true,
                       std::span<const double> rho_hat, double dr);

/// Least-squares slope of log(error) against log(dx); needs >= 3 strictly
/// positive points.
double convergence_slope(std::span<const std::pair<double, double>> points);

struct EstimateResult {
  Eigen::VectorXd c;
  double lambda = 0.0;
  Eigen::VectorXd phi_hat;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double loss = 0.0;  // validation-block upper loss at c
  std::string method;
  std::string norm;
};

}  // namespace levyrkhs
