#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "levyrkhs/errors.hpp"
#include "levyrkhs/model.hpp"
#include "levyrkhs/rng.hpp"

using namespace levyrkhs;

TEST_CASE("drift evaluation") {
  CHECK(eval_drift(LinearDrift{-0.5}, 2.0) == doctest::Approx(-1.0));
  CHECK(eval_drift(SineDrift{}, 0.0) == doctest::Approx(0.0));
  CHECK(eval_drift(TabulatedFn{{0.0, 1.0}, {1.0, 3.0}}, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(eval_drift(TabulatedFn{{0.0, 1.0}, {1.0, 3.0}}, 1.5), std::domain_error);
}

TEST_CASE("levy density evaluation") {
  CHECK(eval_levy_density(GaussianDecay{}, 0.0) == doctest::Approx(1.0));
  CHECK(eval_levy_density(ExponentialDecay{}, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(eval_levy_density(GaussianDecay{}, 1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("levy density is symmetric in its argument") {
  StreamRng rng(7, 0);
  for (int i = 0; i < 50; ++i) {
    const double r = 4.0 * rng.uniform() - 2.0;
    CHECK(eval_levy_density(GaussianDecay{}, r) == eval_levy_density(GaussianDecay{}, -r));
    CHECK(eval_levy_density(ExponentialDecay{}, r) == eval_levy_density(ExponentialDecay{}, -r));
  }
}

namespace {
double trapezoid_mass(const LevyDensitySpec& spec) {
  const int n = 400000;
  const double a = -8.0, b = 8.0;
  const double h = (b - a) / n;
  double acc = 0.5 * (eval_levy_density(spec, a) + eval_levy_density(spec, b));
  for (int i = 1; i < n; ++i) acc += eval_levy_density(spec, a + i * h);
  return acc * h;
}
}  // namespace

TEST_CASE("jump laws match the density mass") {
  const JumpLaw gauss = jump_law_for(GaussianDecay{});
  CHECK(gauss.rate == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(trapezoid_mass(GaussianDecay{}) == doctest::Approx(gauss.rate).epsilon(1e-6));
  const auto& n = std::get<NormalJumps>(gauss.sampler);
  CHECK(n.mean == 0.0);
  CHECK(n.stddev * n.stddev == doctest::Approx(0.5).epsilon(1e-12));

  const JumpLaw expo = jump_law_for(ExponentialDecay{});
  CHECK(expo.rate == doctest::Approx(1.0));
  CHECK(trapezoid_mass(ExponentialDecay{}) == doctest::Approx(1.0).epsilon(1e-6));
  const auto& l = std::get<LaplaceJumps>(expo.sampler);
  CHECK(l.location == 0.0);
  CHECK(l.scale == doctest::Approx(0.5));

  CHECK_THROWS_AS(jump_law_for(LevyDensitySpec{TabulatedFn{{0.0, 2.0}, {1.0, 0.0}}}),
                  std::invalid_argument);
}

TEST_CASE("problem domain validation") {
  ProblemDomain good{5.0, 2.0, 0.01};
  CHECK_NOTHROW(good.validate());
  CHECK(good.interior_min() == doctest::Approx(-3.0));

  CHECK_THROWS_AS((ProblemDomain{2.0, 2.5, 0.01}.validate()), ConfigError);  // R0 >= L
  CHECK_THROWS_AS((ProblemDomain{5.0, 2.0, 1.5}.validate()), ConfigError);   // R0/dx < 2
  CHECK_THROWS_AS((ProblemDomain{5.0, 2.0, -0.1}.validate()), ConfigError);
}
