#include "levyrkhs/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

namespace {

constexpr double kNegativeFloor = -1e-8;

// One explicit Euler step of
//   p_t = -(b p)_x + (1/2) p_xx + sum_k phi(r_k) (p(x+r_k) + p(x-r_k) - 2 p(x)) dr
// with the jump sum restricted to j in [j_lo, j_hi] and zero ghost values.
void step(const std::vector<double>& p, std::vector<double>& pn,
          const std::vector<double>& bval, const std::vector<double>& phi, int j_lo, int j_hi,
          double dx, double dt, double phi_sum2) {
  const int nx = static_cast<int>(p.size());
  const int nr = static_cast<int>(phi.size()) - 1;
  const double inv2dx = 1.0 / (2.0 * dx);
  const double invdx2 = 1.0 / (dx * dx);

#pragma omp parallel for schedule(static)
  for (int j = 0; j < nx; ++j) {
    const double pl = j > 0 ? p[j - 1] : 0.0;
    const double pr = j < nx - 1 ? p[j + 1] : 0.0;
    const double bpl = j > 0 ? bval[j - 1] * pl : 0.0;
    const double bpr = j < nx - 1 ? bval[j + 1] * pr : 0.0;
    double rate = -(bpr - bpl) * inv2dx + 0.5 * (pr - 2.0 * p[j] + pl) * invdx2;
    if (j >= j_lo && j <= j_hi) {
      double acc = 0.0;
      for (int k = 1; k <= nr; ++k) acc += phi[k] * (p[j + k] + p[j - k]);
      rate += dx * acc - phi_sum2 * p[j];
    }
    pn[j] = p[j] + dt * rate;
  }
}

}  // namespace

double FpeConfig::effective_dt() const { return (horizon / n_snapshots) / steps_per_snapshot(); }

int FpeConfig::steps_per_snapshot() const {
  const double dt_obs = horizon / n_snapshots;
  return static_cast<int>(std::ceil(dt_obs / solver_dt - 1e-9));
}

void FpeConfig::validate() const {
  domain.validate();
  if (!(solver_dx > 0.0) || !(solver_dt > 0.0) || !(horizon > 0.0) || n_snapshots < 1) {
    throw ConfigError("fpe: solver_dx, solver_dt, horizon must be positive and N >= 1");
  }
  if (solver_dt > solver_dx * solver_dx * (1.0 + 1e-12)) {
    throw ConfigError("fpe: CFL violation, require solver_dt <= solver_dx^2");
  }
  const double ratio = domain.dx / solver_dx;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
    throw ConfigError("fpe: observation dx must be an integer multiple of solver_dx");
  }
  if (!initial_condition.empty()) {
    if (initial_condition.size() != fpe_solver_grid(*this).size()) {
      throw ConfigError("fpe: initial condition size does not match the solver grid");
    }
    double mass = 0.0;
    for (double v : initial_condition) mass += v * solver_dx;
    if (std::abs(mass - 1.0) > 1e-10) {
      throw ConfigError("fpe: initial condition mass deviates from 1 beyond 1e-10");
    }
  }
}

std::vector<double> fpe_solver_grid(const FpeConfig& cfg) {
  const double L = cfg.domain.half_width;
  const int nx = static_cast<int>(std::lround(2.0 * L / cfg.solver_dx)) + 1;
  std::vector<double> x(static_cast<std::size_t>(nx));
  for (int j = 0; j < nx; ++j) x[static_cast<std::size_t>(j)] = -L + j * cfg.solver_dx;
  return x;
}

std::vector<double> default_initial_condition(const FpeConfig& cfg) {
  const auto x = fpe_solver_grid(cfg);
  std::vector<double> p(x.size());
  const double s2 = cfg.ic_std * cfg.ic_std;
  double mass = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    p[j] = std::exp(-0.5 * x[j] * x[j] / s2);
    mass += p[j] * cfg.solver_dx;
  }
  for (double& v : p) v /= mass;
  return p;
}

DensityDataset solve_fpe_native(const DriftSpec& drift, const LevyDensitySpec& levy,
                                const FpeConfig& cfg) {
  cfg.validate();
  const auto x = fpe_solver_grid(cfg);
  const int nx = static_cast<int>(x.size());
  const double dx = cfg.solver_dx;

  std::vector<double> bval(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) bval[j] = eval_drift(drift, x[j]);

  // r_k = k*dx for k = 0..nr with r_nr <= R0; k = 0 contributes nothing.
  const int nr = static_cast<int>(std::floor(cfg.domain.support_radius / dx + 1e-9));
  std::vector<double> phi(static_cast<std::size_t>(nr) + 1);
  for (int k = 0; k <= nr; ++k) phi[static_cast<std::size_t>(k)] = eval_levy_density(levy, k * dx);
  double phi_sum2 = 0.0;
  for (int k = 1; k <= nr; ++k) phi_sum2 += phi[static_cast<std::size_t>(k)];
  phi_sum2 *= 2.0 * dx;

  // interior nodes where the jump term is evaluated: x_j in [-L+R0, L-R0]
  int j_lo = nx, j_hi = -1;
  for (int j = 0; j < nx; ++j) {
    if (x[static_cast<std::size_t>(j)] >= cfg.domain.interior_min() - 1e-12 &&
        x[static_cast<std::size_t>(j)] <= cfg.domain.interior_max() + 1e-12) {
      j_lo = std::min(j_lo, j);
      j_hi = std::max(j_hi, j);
    }
  }
  if (j_lo - nr < 0 || j_hi + nr > nx - 1) {
    throw ConfigError("fpe: interior region reaches outside the solver grid");
  }

  std::vector<double> p =
      cfg.initial_condition.empty() ? default_initial_condition(cfg) : cfg.initial_condition;
  std::vector<double> pn(p.size());

  const int N = cfg.n_snapshots;
  const int S = cfg.steps_per_snapshot();
  const double dt = cfg.effective_dt();
  const double dt_obs = cfg.horizon / N;
  const bool solver_mode = cfg.time_difference == TimeDifferenceMode::Solver;

  DensityDataset ds;
  ds.source = DatasetSource::Fpe;
  ds.x_grid = x;
  ds.dt_obs = dt_obs;
  ds.companion_dt = solver_mode ? dt : dt_obs;
  ds.times.resize(static_cast<std::size_t>(N) + 1);
  ds.values.resize(N + 1, nx);
  Eigen::MatrixXd comp;
  if (solver_mode) comp.resize(N + 1, nx);

  auto record = [&](Eigen::MatrixXd& m, int row) {
    for (int j = 0; j < nx; ++j) m(row, j) = std::max(p[static_cast<std::size_t>(j)], 0.0);
  };

  ds.times[0] = 0.0;
  record(ds.values, 0);
  const long total_steps = static_cast<long>(N) * S + (solver_mode ? 1 : 0);
  for (long s = 1; s <= total_steps; ++s) {
    step(p, pn, bval, phi, j_lo, j_hi, dx, dt, phi_sum2);
    p.swap(pn);
    const double lo = *std::min_element(p.begin(), p.end());
    if (lo < kNegativeFloor) {
      throw InstabilityError("fpe: density dropped to " + std::to_string(lo) + " at step " +
                             std::to_string(s));
    }
    if (s % S == 0 && s / S <= N) {
      const int row = static_cast<int>(s / S);
      ds.times[static_cast<std::size_t>(row)] = row * dt_obs;
      record(ds.values, row);
    }
    if (solver_mode && (s - 1) % S == 0 && (s - 1) / S <= N) {
      record(comp, static_cast<int>((s - 1) / S));
    }
  }
  if (solver_mode) ds.companions = std::move(comp);
  return ds;
}

DensityDataset solve_fpe(const DriftSpec& drift, const LevyDensitySpec& levy,
                         const FpeConfig& cfg) {
  return subsample_dataset(solve_fpe_native(drift, levy, cfg), cfg.domain.dx);
}

}  // namespace levyrkhs
