#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "levyrkhs/errors.hpp"
#include "levyrkhs/regsolve.hpp"
#include "levyrkhs/rng.hpp"

using namespace levyrkhs;

namespace {

Eigen::MatrixXd random_matrix(StreamRng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, 1.0);
  return m;
}

Eigen::VectorXd random_vector(StreamRng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal(0.0, 1.0);
  return v;
}

double recon_error_A(const Eigen::MatrixXd& A, const GsvdFactors& f) {
  return (A - f.U * f.sigma.asDiagonal() * f.Xinv).norm() / A.norm();
}
double recon_error_K(const Eigen::MatrixXd& K, const GsvdFactors& f) {
  return (K - f.V * f.mu.asDiagonal() * f.Xinv).norm() / K.norm();
}

}  // namespace

TEST_CASE("psd_sqrt basics") {
  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  Eigen::MatrixXd root = psd_sqrt(d);
  CHECK((root - Eigen::MatrixXd(Eigen::Vector2d(2.0, 3.0).asDiagonal())).norm() < 1e-12);
  CHECK((psd_sqrt(Eigen::MatrixXd::Identity(4, 4)) - Eigen::MatrixXd::Identity(4, 4)).norm() <
        1e-12);

  StreamRng rng(11, 0);
  const Eigen::MatrixXd b = random_matrix(rng, 12, 8);
  const Eigen::MatrixXd g = b.transpose() * b;
  const Eigen::MatrixXd k = psd_sqrt(g);
  CHECK((k * k - g).norm() / g.norm() < 1e-10);

  Eigen::MatrixXd asym = g;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(psd_sqrt(asym), std::invalid_argument);

  Eigen::MatrixXd indef = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(psd_sqrt(indef), SolveError);
}

TEST_CASE("gsvd of the identity pair") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const GsvdFactors f = gsvd(eye, eye);
  REQUIRE(f.rank() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(f.sigma(i) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(f.mu(i) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("gsvd rejects a zero K") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(gsvd(a, Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("gsvd reconstruction and orthogonality") {
  StreamRng rng(17, 0);
  const Eigen::MatrixXd a = random_matrix(rng, 50, 20);
  const Eigen::MatrixXd b = random_matrix(rng, 20, 20);
  const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
  const GsvdFactors f = gsvd(a, k);
  CHECK(recon_error_A(a, f) < 1e-10);
  CHECK(recon_error_K(k, f) < 1e-10);
  CHECK((f.U.transpose() * f.U - Eigen::MatrixXd::Identity(f.rank(), f.rank())).norm() < 1e-10);
  CHECK((f.V.transpose() * f.V - Eigen::MatrixXd::Identity(f.rank(), f.rank())).norm() < 1e-10);
  for (int i = 0; i < f.rank(); ++i) {
    CHECK(std::abs(f.sigma(i) * f.sigma(i) + f.mu(i) * f.mu(i) - 1.0) < 1e-12);
  }
}

TEST_CASE("gsvd handles rank-deficient pairs by truncation") {
  StreamRng rng(23, 0);
  const int n = 12;
  const Eigen::MatrixXd b = random_matrix(rng, 5, n);  // rank 5 Gram
  const Eigen::MatrixXd g = b.transpose() * b;
  const Eigen::MatrixXd k = psd_sqrt(g);
  const Eigen::MatrixXd a = random_matrix(rng, 30, 5) * b;  // same row space
  const GsvdFactors f = gsvd(a, k);
  CHECK(f.rank() == 5);
  CHECK(recon_error_A(a, f) < 1e-10);
  CHECK(recon_error_K(k, f) < 1e-10);
  CHECK((f.V.transpose() * f.V - Eigen::MatrixXd::Identity(f.rank(), f.rank())).norm() < 1e-10);
}

TEST_CASE("tikhonov filter solution") {
  SUBCASE("identity pair reduces to scalar shrinkage") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    const GsvdFactors f = gsvd(eye, eye);
    StreamRng rng(29, 0);
    const Eigen::VectorXd rhs = random_vector(rng, 4);
    for (double lambda : {1e-4, 0.1, 1.0, 50.0}) {
      const TikhonovSolution sol = tikhonov_solve(f, rhs, lambda);
      CHECK((sol.c - rhs / (1.0 + lambda)).norm() < 1e-12 * rhs.norm());
    }
  }
  SUBCASE("coefficient norm decreases with lambda") {
    StreamRng rng(31, 0);
    const Eigen::MatrixXd a = random_matrix(rng, 15, 6);
    const Eigen::MatrixXd b = random_matrix(rng, 6, 6);
    const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
    const GsvdFactors f = gsvd(a, k);
    const Eigen::VectorXd rhs = random_vector(rng, 15);
    double prev = 1e300;
    for (double lg = -8.0; lg <= 8.0; lg += 0.5) {
      const double norm = tikhonov_solve(f, rhs, std::pow(10.0, lg)).c.norm();
      CHECK(norm <= prev * (1.0 + 1e-12));
      prev = norm;
    }
    const double heavy = tikhonov_solve(f, rhs, 1e12).c.norm();
    const double light = tikhonov_solve(f, rhs, 1e-12).c.norm();
    CHECK(heavy <= 1e-6 * light);
  }
}

TEST_CASE("direct solve oracle cases") {
  StreamRng rng(37, 0);
  SUBCASE("matches the filter route") {
    const Eigen::MatrixXd a = random_matrix(rng, 8, 5);
    const Eigen::MatrixXd b = random_matrix(rng, 5, 5);
    const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
    const Eigen::VectorXd rhs = random_vector(rng, 8);
    const GsvdFactors f = gsvd(a, k);
    const TikhonovSolution filt = tikhonov_solve(f, rhs, 1e-3);
    const TikhonovSolution dir = direct_solve(a, k, rhs, 1e-3);
    CHECK((filt.c - dir.c).norm() / dir.c.norm() < 1e-8);
    CHECK(filt.residual_norm == doctest::Approx(dir.residual_norm).epsilon(1e-8));
    CHECK(filt.penalty_norm == doctest::Approx(dir.penalty_norm).epsilon(1e-8));
  }
  SUBCASE("unregularized square solve") {
    Eigen::MatrixXd a = random_matrix(rng, 5, 5);
    a += 5.0 * Eigen::MatrixXd::Identity(5, 5);  // keep it well conditioned
    const Eigen::VectorXd rhs = random_vector(rng, 5);
    const TikhonovSolution sol = direct_solve(a, Eigen::MatrixXd::Identity(5, 5), rhs, 0.0);
    CHECK((a * sol.c - rhs).norm() < 1e-10 * rhs.norm());
  }
  SUBCASE("zero data gives zero coefficients") {
    const Eigen::MatrixXd a = random_matrix(rng, 6, 3);
    const TikhonovSolution sol =
        direct_solve(a, Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(6), 0.5);
    CHECK(sol.c.norm() == 0.0);
  }
  SUBCASE("singular normal equations are rejected") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 3);
    a.col(0).setOnes();
    CHECK_THROWS_AS(direct_solve(a, Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Ones(4), 1.0),
                    SolveError);
  }
}

TEST_CASE("residual and penalty norms are consistent with the coefficients") {
  StreamRng rng(41, 0);
  const Eigen::MatrixXd a = random_matrix(rng, 20, 7);
  const Eigen::MatrixXd b = random_matrix(rng, 7, 7);
  const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
  const Eigen::VectorXd rhs = random_vector(rng, 20);
  const GsvdFactors f = gsvd(a, k);
  for (double lg : {-6.0, -2.0, 0.0, 3.0}) {
    const TikhonovSolution sol = tikhonov_solve(f, rhs, std::pow(10.0, lg));
    CHECK(std::abs(sol.residual_norm - (a * sol.c - rhs).norm()) < 1e-10);
    CHECK(std::abs(sol.penalty_norm - (k * sol.c).norm()) < 1e-10);
  }
}

TEST_CASE("residual grows and penalty shrinks along the lambda grid") {
  StreamRng rng(43, 0);
  const Eigen::MatrixXd a = random_matrix(rng, 25, 10);
  const Eigen::MatrixXd b = random_matrix(rng, 10, 10);
  const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
  const Eigen::VectorXd rhs = random_vector(rng, 25);
  const GsvdFactors f = gsvd(a, k);
  double prev_res = -1.0, prev_pen = 1e300;
  for (double lg = -10.0; lg <= 6.0; lg += 0.25) {
    const TikhonovSolution sol = tikhonov_solve(f, rhs, std::pow(10.0, lg));
    CHECK(sol.residual_norm >= prev_res - 1e-12);
    CHECK(sol.penalty_norm <= prev_pen + 1e-12);
    prev_res = sol.residual_norm;
    prev_pen = sol.penalty_norm;
  }
}

TEST_CASE("filter and direct routes agree on random instances") {
  StreamRng rng(47, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 18);
    const int m = n + static_cast<int>(rng.uniform() * (60 - n));
    const Eigen::MatrixXd a = random_matrix(rng, m, n);
    const Eigen::MatrixXd b = random_matrix(rng, n, n);
    const Eigen::MatrixXd k = psd_sqrt(Eigen::MatrixXd(b.transpose() * b));
    const Eigen::VectorXd rhs = random_vector(rng, m);
    const double lambda = std::pow(10.0, -6.0 + 8.0 * rng.uniform());
    const GsvdFactors f = gsvd(a, k);
    const TikhonovSolution filt = tikhonov_solve(f, rhs, lambda);
    const TikhonovSolution dir = direct_solve(a, k, rhs, lambda);
    CHECK((filt.c - dir.c).norm() / std::max(dir.c.norm(), 1e-300) < 1e-8);
  }
}
