#include "levyrkhs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

void ProblemDomain::validate() const {
  if (!(half_width > 0.0) || !(support_radius > 0.0) || !(dx > 0.0)) {
    throw ConfigError("domain: L, R0 and dx must be positive");
  }
  if (!(support_radius < half_width)) {
    throw ConfigError("domain: require R0 < L");
  }
  if (support_radius / dx < 2.0 - 1e-12) {
    throw ConfigError("domain: require R0/dx >= 2 (at least two r-grid points)");
  }
  if (!(interior_min() < interior_max())) {
    throw ConfigError("domain: interior region [-L+R0, L-R0] is empty");
  }
}

double TabulatedFn::operator()(double x) const {
  if (grid.size() < 2 || grid.size() != values.size()) {
    throw std::invalid_argument("tabulated function needs matching grid/values with >= 2 points");
  }
  if (x < grid.front() || x > grid.back()) {
    throw std::domain_error("tabulated function evaluated outside its grid");
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return values.back();
  if (it == grid.begin()) return values.front();
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return (1.0 - t) * values[lo] + t * values[hi];
}

double eval_drift(const DriftSpec& spec, double x) {
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearDrift>) {
          return s.slope * x;
        } else if constexpr (std::is_same_v<T, SineDrift>) {
          return std::sin(x);
        } else {
          return s(x);
        }
      },
      spec);
}

double eval_levy_density(const LevyDensitySpec& spec, double r) {
  const double a = std::abs(r);
  return std::visit(
      [a](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianDecay>) {
          return std::exp(-a * a);
        } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
          return std::exp(-2.0 * a);
        } else {
          return s(a);
        }
      },
      spec);
}

JumpLaw jump_law_for(const LevyDensitySpec& spec) {
  if (std::holds_alternative<GaussianDecay>(spec)) {
    // rate = int exp(-y^2) dy = sqrt(pi); jump sizes N(0, 1/2)
    return JumpLaw{std::sqrt(M_PI), NormalJumps{0.0, std::sqrt(0.5)}};
  }
  if (std::holds_alternative<ExponentialDecay>(spec)) {
    // rate = int exp(-2|y|) dy = 1; jump sizes Laplace(0, 1/2)
    return JumpLaw{1.0, LaplaceJumps{0.0, 0.5}};
  }
  throw std::invalid_argument("no built-in jump law for a tabulated density");
}

}  // namespace levyrkhs
