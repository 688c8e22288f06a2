#include "levyrkhs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "levyrkhs/errors.hpp"
#include "levyrkhs/rng.hpp"

namespace levyrkhs {

namespace {

constexpr double kKernelCutoff = 8.5;  // bandwidths; exp(-36) < 3e-16

double draw_jump(StreamRng& rng, const JumpLaw& law) {
  if (const auto* n = std::get_if<NormalJumps>(&law.sampler)) {
    return rng.normal(n->mean, n->stddev);
  }
  const auto& l = std::get<LaplaceJumps>(law.sampler);
  return rng.laplace(l.location, l.scale);
}

// Advances one path and hands every state (including X_0 = 0) to `record`.
template <class Record>
void simulate_path(const EnsembleConfig& cfg, std::uint64_t path, Record&& record) {
  StreamRng rng(cfg.seed, path);
  const double jump_mean = cfg.jump.rate * cfg.dt;
  double x = 0.0;
  record(0, x);
  const int steps = cfg.n_steps();
  for (int s = 1; s <= steps; ++s) {
    double dl = 0.0;
    if (jump_mean > 0.0) {
      const int n_jumps = rng.poisson(jump_mean);
      for (int i = 0; i < n_jumps; ++i) dl += draw_jump(rng, cfg.jump);
    }
    x += eval_drift(cfg.drift, x) * cfg.dt + dl;
    record(s, x);
  }
}

}  // namespace

int EnsembleConfig::n_steps() const { return static_cast<int>(std::lround(horizon / dt)); }

void EnsembleConfig::validate() const {
  if (n_paths < 1) throw ConfigError("ensemble: need at least one path");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("ensemble: dt and horizon must be positive");
  const double ratio = horizon / dt;
  if (n_steps() < 1 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("ensemble: horizon/dt must be a positive integer");
  }
  if (jump.rate < 0.0) throw ConfigError("ensemble: jump rate must be nonnegative");
}

double KdeConfig::bandwidth(std::size_t n_paths, double dt) const {
  return bandwidth_constant * std::pow(static_cast<double>(n_paths) * dt * dt, -0.2);
}

void KdeConfig::validate() const {
  if (!(bandwidth_constant > 0.0)) throw ConfigError("kde: bandwidth constant must be positive");
  if (smoothing_window % 2 == 0 || smoothing_window < 1 || smoothing_order < 1 ||
      smoothing_window <= smoothing_order) {
    throw ConfigError("kde: smoothing window must be odd and exceed the order");
  }
  if (grid.size() < 2) throw ConfigError("kde: grid needs >= 2 nodes");
  const double dx = grid[1] - grid[0];
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (std::abs((grid[j] - grid[j - 1]) - dx) > 1e-9 * std::max(1.0, std::abs(dx))) {
      throw ConfigError("kde: grid must be uniform");
    }
  }
}

Eigen::MatrixXd simulate_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const int n_times = cfg.n_steps() + 1;
  Eigen::MatrixXd samples(n_times, static_cast<Eigen::Index>(cfg.n_paths));
  const auto n_paths = static_cast<long long>(cfg.n_paths);
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < n_paths; ++j) {
    double* col = samples.col(static_cast<Eigen::Index>(j)).data();
    simulate_path(cfg, static_cast<std::uint64_t>(j), [col](int s, double x) { col[s] = x; });
  }
  return samples;
}

std::vector<double> kde_density(std::span<const double> samples, std::span<const double> grid,
                                double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde: empty sample slice");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");
  std::vector<double> acc(grid.size(), 0.0);
  const double x0 = grid.front();
  const double dx = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  const double reach = kKernelCutoff * bandwidth;
  const long last = static_cast<long>(grid.size()) - 1;
  for (double s : samples) {
    const long j_lo = std::max(0L, static_cast<long>(std::ceil((s - reach - x0) / dx)));
    const long j_hi = std::min(last, static_cast<long>(std::floor((s + reach - x0) / dx)));
    for (long j = j_lo; j <= j_hi; ++j) {
      const double z = (grid[static_cast<std::size_t>(j)] - s) / bandwidth;
      acc[static_cast<std::size_t>(j)] += std::exp(-0.5 * z * z);
    }
  }
  const double scale =
      1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * M_PI));
  for (double& v : acc) v *= scale;
  return acc;
}

std::vector<double> savgol_smooth(std::span<const double> values, int window, int order) {
  if (window % 2 == 0 || window < 1 || order < 1 || window <= order) {
    throw std::invalid_argument("savgol: window must be odd and exceed the order");
  }
  const int n = static_cast<int>(values.size());
  if (n < window) throw std::invalid_argument("savgol: input shorter than the window");

  const int half = window / 2;
  // P(i, m) = i^m over window positions 0..w-1; weights for evaluating the
  // fitted polynomial at position d are P (P^T P)^{-1} [1, d, d^2, ...]^T.
  Eigen::MatrixXd P(window, order + 1);
  for (int i = 0; i < window; ++i) {
    double pw = 1.0;
    for (int m = 0; m <= order; ++m) {
      P(i, m) = pw;
      pw *= i;
    }
  }
  const Eigen::MatrixXd gram = P.transpose() * P;
  const auto solver = gram.ldlt();
  auto weights_at = [&](double d) {
    Eigen::VectorXd t(order + 1);
    double pw = 1.0;
    for (int m = 0; m <= order; ++m) {
      t(m) = pw;
      pw *= d;
    }
    return Eigen::VectorXd(P * solver.solve(t));
  };

  const Eigen::VectorXd w_center = weights_at(half);
  std::vector<double> out(static_cast<std::size_t>(n));
  auto apply = [&](const Eigen::VectorXd& w, int start) {
    double acc = 0.0;
    for (int i = 0; i < window; ++i) acc += w(i) * values[static_cast<std::size_t>(start + i)];
    return acc;
  };
  for (int i = 0; i < n; ++i) {
    if (i < half) {
      out[static_cast<std::size_t>(i)] = apply(weights_at(i), 0);
    } else if (i >= n - half) {
      out[static_cast<std::size_t>(i)] = apply(weights_at(i - (n - window)), n - window);
    } else {
      out[static_cast<std::size_t>(i)] = apply(w_center, i - half);
    }
  }
  return out;
}

DensityDataset build_kde_dataset(const EnsembleConfig& cfg, const KdeConfig& kde,
                                 KdeBuildInfo* info) {
  cfg.validate();
  kde.validate();
  const int n_times = cfg.n_steps() + 1;
  const auto n_nodes = kde.grid.size();
  const double h = kde.bandwidth(cfg.n_paths, cfg.dt);
  const double x0 = kde.grid.front();
  const double dxg = kde.grid[1] - kde.grid[0];
  const double reach = kKernelCutoff * h;
  const long last = static_cast<long>(n_nodes) - 1;

  // Accumulate raw kernel sums block by block; per node the addition order is
  // global path order, so the result matches a single kde_density call.
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(n_times),
                                       std::vector<double>(n_nodes, 0.0));
  const std::size_t block = 1 << 16;
  Eigen::MatrixXd chunk(n_times, static_cast<Eigen::Index>(std::min(block, cfg.n_paths)));
  for (std::size_t start = 0; start < cfg.n_paths; start += block) {
    const std::size_t count = std::min(block, cfg.n_paths - start);
    const auto count_ll = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < count_ll; ++j) {
      double* col = chunk.col(static_cast<Eigen::Index>(j)).data();
      simulate_path(cfg, static_cast<std::uint64_t>(start) + static_cast<std::uint64_t>(j),
                    [col](int s, double x) { col[s] = x; });
    }
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_times; ++t) {
      auto& row = acc[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < count; ++j) {
        const double s = chunk(t, static_cast<Eigen::Index>(j));
        const long j_lo = std::max(0L, static_cast<long>(std::ceil((s - reach - x0) / dxg)));
        const long j_hi = std::min(last, static_cast<long>(std::floor((s + reach - x0) / dxg)));
        for (long g = j_lo; g <= j_hi; ++g) {
          const double z = (kde.grid[static_cast<std::size_t>(g)] - s) / h;
          row[static_cast<std::size_t>(g)] += std::exp(-0.5 * z * z);
        }
      }
    }
  }

  const double scale = 1.0 / (static_cast<double>(cfg.n_paths) * h * std::sqrt(2.0 * M_PI));
  long clamped = 0;
  DensityDataset ds;
  ds.source = DatasetSource::Kde;
  ds.x_grid = kde.grid;
  ds.dt_obs = cfg.dt;
  ds.companion_dt = cfg.dt;
  ds.times.resize(static_cast<std::size_t>(n_times));
  ds.values.resize(n_times, static_cast<Eigen::Index>(n_nodes));
  for (int t = 0; t < n_times; ++t) {
    ds.times[static_cast<std::size_t>(t)] = t * cfg.dt;
    auto& row = acc[static_cast<std::size_t>(t)];
    for (double& v : row) v *= scale;
    const auto smoothed = savgol_smooth(row, kde.smoothing_window, kde.smoothing_order);
    for (std::size_t j = 0; j < n_nodes; ++j) {
      double v = smoothed[j];
      if (v < 0.0) {
        v = 0.0;
        ++clamped;
      }
      ds.values(t, static_cast<Eigen::Index>(j)) = v;
    }
  }
  if (info) {
    info->bandwidth = h;
    info->clamped_negative_values = clamped;
  }
  return ds;
}

void dump_samples(const Eigen::MatrixXd& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
      const double v = samples(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

}  // namespace levyrkhs
