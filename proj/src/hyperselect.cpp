#include "levyrkhs/hyperselect.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

std::string penalty_norm_name(PenaltyNormKind kind) {
  switch (kind) {
    case PenaltyNormKind::Rkhs: return "rkhs";
    case PenaltyNormKind::L2Rho: return "l2rho";
    case PenaltyNormKind::Euclidean: return "l2";
  }
  return "?";
}

Eigen::MatrixXd penalty_root(PenaltyNormKind kind, const RegressionSystem& sys) {
  switch (kind) {
    case PenaltyNormKind::Rkhs:
      return psd_sqrt(sys.Gbar);
    case PenaltyNormKind::L2Rho: {
      const Eigen::VectorXd w = sys.dr * sys.rho_hat;
      const Eigen::MatrixXd quad = sys.Gbar * w.asDiagonal() * sys.Gbar.transpose();
      return psd_sqrt(0.5 * (quad + quad.transpose()));
    }
    case PenaltyNormKind::Euclidean:
      return Eigen::MatrixXd::Identity(sys.Gbar.rows(), sys.Gbar.cols());
  }
  throw std::invalid_argument("unknown penalty norm");
}

TikhonovProblem::TikhonovProblem(const SystemSplit& split, PenaltyNormKind norm)
    : norm_(norm),
      A_train_(split.A_train),
      A_valid_(split.A_valid),
      f_train_(split.f_train),
      f_valid_(split.f_valid) {
  const Eigen::MatrixXd root = penalty_root(norm, *split.full);
  penalty_gram_ = root.transpose() * root;
  factors_ = gsvd(A_train_, root);
}

TikhonovSolution TikhonovProblem::lower_solve(double gamma) const {
  return tikhonov_solve(factors_, f_train_, std::pow(10.0, gamma));
}

double TikhonovProblem::upper_loss(const Eigen::VectorXd& c) const {
  return (A_valid_ * c - f_valid_).squaredNorm();
}

double TikhonovProblem::hypergradient(double gamma, const Eigen::VectorXd& c) const {
  const double lambda = std::pow(10.0, gamma);
  const Eigen::VectorXd upper_grad =
      A_valid_.transpose() * (A_valid_ * c - f_valid_);  // (1/2) dE/dc
  const Eigen::VectorXd pc = penalty_gram_ * c;
  // (A_L^T A_L + lambda K^T K)^{-1} applied through the GSVD identity
  Eigen::VectorXd w = factors_.X.transpose() * pc;
  for (int i = 0; i < factors_.rank(); ++i) {
    const double s = factors_.sigma(i);
    const double mu = factors_.mu(i);
    w(i) /= s * s + lambda * mu * mu;
  }
  const Eigen::VectorXd solved = factors_.X * w;
  return -2.0 * std::log(10.0) * lambda * upper_grad.dot(solved);
}

BilevelResult bilevel_optimize(const SystemSplit& split, PenaltyNormKind norm,
                               const BilevelConfig& cfg) {
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
    throw std::invalid_argument("bilevel: momentum must lie in [0, 1)");
  }
  if (cfg.max_iters < 1 || cfg.stop_window < 1) {
    throw std::invalid_argument("bilevel: max_iters and stop window must be positive");
  }
  const TikhonovProblem problem(split, norm);

  BilevelTrace trace;
  trace.records.reserve(static_cast<std::size_t>(cfg.max_iters));
  double gamma = cfg.gamma0;
  double v = cfg.v0;
  double prev_gamma = gamma;
  double prev_loss = std::numeric_limits<double>::quiet_NaN();
  std::deque<bool> window_ok;
  trace.stop_reason = StopReason::MaxIters;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    const double eta_k = cfg.eta0 / std::sqrt(static_cast<double>(k));
    const double lookahead = gamma - cfg.momentum * v;
    const TikhonovSolution sol = problem.lower_solve(lookahead);
    const double loss = problem.upper_loss(sol.c);
    const double grad = problem.hypergradient(lookahead, sol.c);
    if (!std::isfinite(loss) || !std::isfinite(grad) || !std::isfinite(gamma)) {
      throw DivergenceError("bilevel: non-finite loss, gradient or gamma at iteration " +
                                std::to_string(k),
                            trace);
    }
    trace.records.push_back({k, gamma, loss, v, grad});

    const double dgamma = std::abs(gamma - prev_gamma);
    const double dloss = k == 1 ? 0.0 : std::abs(loss - prev_loss);
    window_ok.push_back(dgamma < cfg.tol_gamma && dloss < cfg.tol_loss);
    if (static_cast<int>(window_ok.size()) > cfg.stop_window) window_ok.pop_front();
    prev_gamma = gamma;
    prev_loss = loss;

    v = cfg.momentum * v + eta_k * grad / (std::abs(grad) + cfg.grad_eps);
    gamma -= v;

    if (static_cast<int>(window_ok.size()) == cfg.stop_window) {
      bool all_ok = true;
      for (bool ok : window_ok) all_ok = all_ok && ok;
      if (all_ok) {
        trace.stop_reason = StopReason::ConvergedWindow;
        break;
      }
    }
  }

  if (!std::isfinite(gamma)) throw DivergenceError("bilevel: final gamma not finite", trace);
  BilevelResult result;
  result.gamma = gamma;
  result.lambda = std::pow(10.0, gamma);
  result.c = problem.lower_solve(gamma).c;
  result.trace = std::move(trace);
  return result;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  grid.reserve(141);
  for (int i = 0; i <= 140; ++i) grid.push_back(std::pow(10.0, -12.0 + 0.1 * i));
  return grid;
}

SelectionResult gcv_select(const SystemSplit& split, PenaltyNormKind norm,
                           std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("gcv: empty lambda grid");
  const TikhonovProblem problem(split, norm);
  const auto& fac = problem.factors();
  const double m = static_cast<double>(problem.train_rows());

  SelectionResult result;
  result.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  result.criterion.resize(lambda_grid.size(), std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    const TikhonovSolution sol = tikhonov_solve(fac, split.f_train, lambda);
    double filter_trace = 0.0;
    for (int j = 0; j < fac.rank(); ++j) {
      const double s2 = fac.sigma(j) * fac.sigma(j);
      filter_trace += s2 / (s2 + lambda * fac.mu(j) * fac.mu(j));
    }
    const double den = m - filter_trace;
    if (den <= 0.0) continue;
    const double g = sol.residual_norm * sol.residual_norm / (den * den);
    result.criterion[i] = g;
    if (best_idx < 0 || g <= best) {  // <= ties toward larger lambda
      best = g;
      best_idx = static_cast<int>(i);
    }
  }
  if (best_idx < 0) throw SolveError("gcv: no grid point had a positive denominator");
  result.lambda = lambda_grid[static_cast<std::size_t>(best_idx)];
  result.c = tikhonov_solve(fac, split.f_train, result.lambda).c;
  return result;
}

SelectionResult lcurve_select(const SystemSplit& split, PenaltyNormKind norm,
                              std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("lcurve: empty lambda grid");
  const TikhonovProblem problem(split, norm);
  const auto& fac = problem.factors();

  SelectionResult result;
  result.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  if (lambda_grid.size() == 1) {
    result.lambda = lambda_grid[0];
    result.c = tikhonov_solve(fac, split.f_train, result.lambda).c;
    return result;
  }

  const std::size_t n = lambda_grid.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TikhonovSolution sol = tikhonov_solve(fac, split.f_train, lambda_grid[i]);
    lx[i] = std::log(std::max(sol.residual_norm, 1e-300));
    ly[i] = std::log(std::max(sol.penalty_norm, 1e-300));
  }

  result.criterion.resize(n, std::numeric_limits<double>::quiet_NaN());
  double best = -std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double xp = (lx[i + 1] - lx[i - 1]) / 2.0;
    const double yp = (ly[i + 1] - ly[i - 1]) / 2.0;
    const double xpp = lx[i + 1] - 2.0 * lx[i] + lx[i - 1];
    const double ypp = ly[i + 1] - 2.0 * ly[i] + ly[i - 1];
    const double speed2 = xp * xp + yp * yp;
    if (!(speed2 > 0.0)) continue;
    const double kappa = (xp * ypp - yp * xpp) / std::pow(speed2, 1.5);
    if (!std::isfinite(kappa)) continue;
    result.criterion[i] = kappa;
    if (best_idx < 0 || kappa >= best) {  // >= ties toward larger lambda
      best = kappa;
      best_idx = static_cast<int>(i);
    }
  }
  if (best_idx < 0 || !(best > 1e-10)) {
    std::fprintf(stderr, "[levyrkhs] warning: flat L-curve, falling back to GCV\n");
    SelectionResult fb = gcv_select(split, norm, lambda_grid);
    fb.lcurve_fell_back_to_gcv = true;
    return fb;
  }
  result.lambda = lambda_grid[static_cast<std::size_t>(best_idx)];
  result.c = tikhonov_solve(fac, split.f_train, result.lambda).c;
  return result;
}

}  // namespace levyrkhs
