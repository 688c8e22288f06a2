#include "levyrkhs/regsolve.hpp"

#include <algorithm>
#include <cmath>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

namespace {

constexpr double kRankTol = 1e-12;

// Fill columns of V whose generalized singular value mu vanished with unit
// vectors orthogonal to the existing columns (those columns multiply zero in
// the reconstruction, but V must stay column-orthonormal).
void complete_orthonormal(Eigen::MatrixXd& V, const std::vector<int>& missing) {
  const Eigen::Index n = V.rows();
  for (int col : missing) {
    Eigen::VectorXd best;
    double best_norm = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd cand = Eigen::VectorXd::Unit(n, j);
      cand -= V * (V.transpose() * cand);
      const double norm = cand.norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(cand);
      }
    }
    if (best_norm <= 0.0) {
      throw DecompositionError("gsvd: cannot complete an orthonormal V factor");
    }
    // one re-orthogonalization pass tightens V^T V toward identity
    best -= V * (V.transpose() * best);
    V.col(col) = best / best.norm();
  }
}

}  // namespace

GsvdFactors gsvd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& K) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (m < 1 || n < 1) throw std::invalid_argument("gsvd: empty A");
  if (K.rows() != n || K.cols() != n) {
    throw std::invalid_argument("gsvd: K must be n x n for an m x n A");
  }
  if (K.norm() == 0.0) {
    throw std::invalid_argument("gsvd: K must be a nonzero PSD root");
  }

  Eigen::MatrixXd stacked(m + n, n);
  stacked.topRows(m) = A;
  stacked.bottomRows(n) = K;

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().toDenseMatrix();
  Eigen::BDCSVD<Eigen::MatrixXd> rsvd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& rs = rsvd.singularValues();
  if (!(rs(0) > 0.0)) throw DecompositionError("gsvd: stacked pair is numerically rank zero");
  Eigen::Index p = 0;
  while (p < n && rs(p) > kRankTol * rs(0)) ++p;
  if (p > m) {
    throw DecompositionError("gsvd: pair rank exceeds the row count of A");
  }

  Eigen::MatrixXd Qthin = Eigen::MatrixXd::Identity(m + n, n);
  Qthin = qr.householderQ() * Qthin;
  const Eigen::MatrixXd P = Qthin * rsvd.matrixU().leftCols(p);
  const Eigen::MatrixXd P1 = P.topRows(m);
  const Eigen::MatrixXd P2 = P.bottomRows(n);

  Eigen::BDCSVD<Eigen::MatrixXd> csvd(P1, Eigen::ComputeThinU | Eigen::ComputeFullV);
  GsvdFactors fac;
  fac.U = csvd.matrixU();
  const Eigen::MatrixXd W = csvd.matrixV();  // p x p

  fac.sigma.resize(p);
  fac.mu.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double s = std::clamp(csvd.singularValues()(i), 0.0, 1.0);
    fac.sigma(i) = s;
    fac.mu(i) = std::sqrt(std::max(0.0, 1.0 - s * s));
  }

  // Columns of P2*W are mutually orthogonal with norms mu_i.
  Eigen::MatrixXd B = P2 * W;
  fac.V.resize(n, p);
  fac.V.setZero();
  std::vector<int> missing;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double norm = B.col(i).norm();
    if (norm > 1e-8) {
      fac.V.col(i) = B.col(i) / norm;
    } else {
      missing.push_back(static_cast<int>(i));
    }
  }
  complete_orthonormal(fac.V, missing);

  const Eigen::MatrixXd Vr = rsvd.matrixV().leftCols(p);
  fac.Xinv = W.transpose() * rs.head(p).asDiagonal() * Vr.transpose();
  fac.X = Vr * rs.head(p).cwiseInverse().asDiagonal() * W;
  return fac;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw std::invalid_argument("psd_sqrt: matrix must be square");
  const double scale = G.norm();
  if ((G - G.transpose()).norm() > 1e-10 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("psd_sqrt: matrix is not symmetric");
  }
  const Eigen::MatrixXd S = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) throw DecompositionError("psd_sqrt: eigensolver failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  Eigen::VectorXd roots(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-8 * lmax) {
      throw SolveError("psd_sqrt: matrix is not positive semi-definite");
    }
    roots(i) = ev(i) <= 1e-12 * lmax ? 0.0 : std::sqrt(ev(i));
  }
  Eigen::MatrixXd K = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (K + K.transpose());
}

TikhonovSolution tikhonov_solve(const GsvdFactors& fac, const Eigen::VectorXd& f, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("tikhonov: lambda must be positive");
  if (f.size() != fac.U.rows()) throw std::invalid_argument("tikhonov: f has wrong length");

  const Eigen::VectorXd utf = fac.U.transpose() * f;
  Eigen::VectorXd z(fac.rank());
  for (int i = 0; i < fac.rank(); ++i) {
    const double s = fac.sigma(i);
    const double mu = fac.mu(i);
    z(i) = s / (s * s + lambda * mu * mu) * utf(i);
  }

  TikhonovSolution sol;
  sol.lambda = lambda;
  sol.c = fac.X * z;
  // ||Ac - f||^2 splits into the part inside range(U) and the leftover mass.
  const double inside = (fac.sigma.asDiagonal() * z - utf).squaredNorm();
  const double outside = std::max(0.0, f.squaredNorm() - utf.squaredNorm());
  sol.residual_norm = std::sqrt(inside + outside);
  sol.penalty_norm = (fac.mu.asDiagonal() * z).norm();
  return sol;
}

TikhonovSolution direct_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& K,
                              const Eigen::VectorXd& f, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("direct_solve: lambda must be nonnegative");
  const Eigen::MatrixXd H = A.transpose() * A + lambda * (K.transpose() * K);
  const Eigen::VectorXd rhs = A.transpose() * f;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() != Eigen::Success) {
    throw SolveError("direct_solve: factorization failed");
  }
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  if (pivots.minCoeff() <= 1e-14 * pivots.maxCoeff()) {
    throw SolveError("direct_solve: regularized normal equations are singular");
  }
  TikhonovSolution sol;
  sol.lambda = lambda;
  sol.c = ldlt.solve(rhs);
  const double check = (H * sol.c - rhs).norm();
  if (!sol.c.allFinite() || check > 1e-6 * std::max(1.0, rhs.norm())) {
    throw SolveError("direct_solve: regularized normal equations are numerically unusable");
  }
  sol.residual_norm = (A * sol.c - f).norm();
  sol.penalty_norm = (K * sol.c).norm();
  return sol;
}

}  // namespace levyrkhs
