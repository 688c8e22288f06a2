#include "levyrkhs/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace levyrkhs {

Eigen::VectorXd eval_phi(const RegressionSystem& sys, const Eigen::VectorXd& c) {
  if (c.size() != sys.Gbar.cols()) throw std::invalid_argument("eval_phi: size mismatch");
  return sys.Gbar * c;
}

L2RhoError l2rho_error(std::span<const double> phi_hat, std::span<const double> phi_true,
                       std::span<const double> rho_hat, double dr) {
  if (phi_hat.size() != phi_true.size() || phi_hat.size() != rho_hat.size()) {
    throw std::invalid_argument("l2rho_error: length mismatch");
  }
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t k = 0; k < phi_hat.size(); ++k) {
    const double w = dr * rho_hat[k];
    const double d = phi_hat[k] - phi_true[k];
    err2 += w * d * d;
    ref2 += w * phi_true[k] * phi_true[k];
  }
  L2RhoError e;
  e.absolute = std::sqrt(err2);
  if (!(ref2 > 0.0)) {
    throw std::domain_error("l2rho_error: reference density has zero weighted norm");
  }
  e.relative = e.absolute / std::sqrt(ref2);
  return e;
}

double convergence_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::domain_error("convergence_slope: need at least 3 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [dx, err] : points) {
    if (!(dx > 0.0) || !(err > 0.0)) {
      throw std::domain_error("convergence_slope: points must be strictly positive");
    }
    const double lx = std::log(dx);
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace levyrkhs
