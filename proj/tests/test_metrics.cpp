#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "levyrkhs/metrics.hpp"
#include "levyrkhs/rng.hpp"

using namespace levyrkhs;

namespace {
RegressionSystem tiny_system() {
  RegressionSystem sys;
  sys.r_grid = {0.5, 1.0, 1.5};
  sys.dr = 0.5;
  sys.Gbar.resize(3, 3);
  sys.Gbar << 2.0, 0.5, 0.1, 0.5, 1.5, 0.2, 0.1, 0.2, 1.0;
  sys.rho_hat.resize(3);
  sys.rho_hat << 0.2, 0.4, 1.4;
  return sys;
}
}  // namespace

TEST_CASE("eval_phi applies the kernel matrix") {
  const auto sys = tiny_system();
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 1);
  CHECK((eval_phi(sys, e1) - sys.Gbar.col(1)).norm() == doctest::Approx(0.0));
  CHECK(eval_phi(sys, Eigen::VectorXd::Zero(3)).norm() == doctest::Approx(0.0));

  StreamRng rng(3, 0);
  Eigen::VectorXd c(3);
  for (int i = 0; i < 3; ++i) c(i) = rng.uniform() - 0.5;
  Eigen::VectorXd naive = Eigen::VectorXd::Zero(3);
  for (int k = 0; k < 3; ++k) naive += c(k) * sys.Gbar.col(k);
  CHECK((eval_phi(sys, c) - naive).norm() < 1e-14);
}

TEST_CASE("weighted error") {
  const std::vector<double> truth = {1.0, 2.0, 0.5};
  const std::vector<double> rho = {0.2, 0.4, 1.4};
  SUBCASE("exact estimate") {
    const auto e = l2rho_error(truth, truth, rho, 0.5);
    CHECK(e.absolute == 0.0);
    CHECK(e.relative == 0.0);
  }
  SUBCASE("doubling gives relative one") {
    std::vector<double> twice = {2.0, 4.0, 1.0};
    const auto e = l2rho_error(twice, truth, rho, 0.5);
    CHECK(e.relative == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("hand-computed three point instance") {
    const std::vector<double> est = {1.5, 1.5, 1.0};
    // err^2 = 0.5*(0.2*0.25 + 0.4*0.25 + 1.4*0.25) = 0.25
    // ref^2 = 0.5*(0.2*1 + 0.4*4 + 1.4*0.25)       = 1.075
    const auto e = l2rho_error(est, truth, rho, 0.5);
    CHECK(e.absolute == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.relative == doctest::Approx(0.5 / std::sqrt(1.075)).epsilon(1e-14));
  }
  SUBCASE("scale invariance of the relative error") {
    std::vector<double> est = {1.3, 2.5, 0.1};
    const auto base = l2rho_error(est, truth, rho, 0.5);
    std::vector<double> est2 = est, truth2 = truth;
    for (auto& v : est2) v *= 37.0;
    for (auto& v : truth2) v *= 37.0;
    const auto scaled = l2rho_error(est2, truth2, rho, 0.5);
    CHECK(scaled.relative == doctest::Approx(base.relative).epsilon(1e-14));
  }
  SUBCASE("zero reference is rejected") {
    const std::vector<double> zero = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(l2rho_error(truth, zero, rho, 0.5), std::domain_error);
  }
}

TEST_CASE("convergence slope") {
  using P = std::pair<double, double>;
  std::vector<P> first = {{0.01, 0.01}, {0.02, 0.02}, {0.04, 0.04}, {0.05, 0.05}};
  CHECK(convergence_slope(first) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<P> second = {{0.01, 1e-4}, {0.02, 4e-4}, {0.04, 16e-4}};
  CHECK(convergence_slope(second) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<P> short_list = {{0.01, 0.01}, {0.02, 0.02}};
  CHECK_THROWS_AS(convergence_slope(short_list), std::domain_error);
  std::vector<P> bad = {{0.01, 0.01}, {0.02, -0.02}, {0.04, 0.04}};
  CHECK_THROWS_AS(convergence_slope(bad), std::domain_error);
}
