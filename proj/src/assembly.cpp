#include "levyrkhs/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

namespace {

struct GridLayout {
  std::vector<int> interior;  // indices into ds.x_grid with x in [-L+R0, L-R0]
  std::vector<int> snapshots;
  int n_r = 0;
};

GridLayout layout(const DensityDataset& ds, const ProblemDomain& domain,
                  const AssembleOptions& opt) {
  domain.validate();
  const double dx = ds.x_step();
  if (std::abs(dx - domain.dx) > 1e-9 * domain.dx) {
    throw AssemblyError("assemble: dataset grid spacing does not match the domain dx");
  }
  GridLayout g;
  g.n_r = static_cast<int>(std::floor(domain.support_radius / dx + 1e-9));
  const double lo = domain.interior_min() - 1e-9;
  const double hi = domain.interior_max() + 1e-9;
  for (int j = 0; j < ds.n_x(); ++j) {
    const double x = ds.x_grid[static_cast<std::size_t>(j)];
    if (x >= lo && x <= hi) g.interior.push_back(j);
  }
  if (g.interior.empty()) throw AssemblyError("assemble: no interior grid nodes");
  if (g.interior.front() - g.n_r < 0 || g.interior.back() + g.n_r > ds.n_x() - 1) {
    throw AssemblyError("assemble: interior nodes need x +- R0 on the grid");
  }
  const int first = std::max(0, opt.first_snapshot);
  const int count = ds.n_snapshots();
  for (int i = first; i < count; ++i) g.snapshots.push_back(i);
  if (g.snapshots.empty()) throw AssemblyError("assemble: no usable snapshots");
  return g;
}

}  // namespace

Eigen::MatrixXd compute_f_tilde(const DensityDataset& ds, const DriftSpec& drift,
                                const ProblemDomain& domain, const AssembleOptions& opt) {
  const auto g = layout(ds, domain, opt);
  const double dx = ds.x_step();
  const double dt = ds.companion_dt;
  if (!(dt > 0.0)) throw ConfigError("assemble: dataset lacks a companion spacing");

  std::vector<double> b(ds.x_grid.size());
  for (std::size_t j = 0; j < ds.x_grid.size(); ++j) b[j] = eval_drift(drift, ds.x_grid[j]);

  const int N = static_cast<int>(g.snapshots.size());
  const int M = static_cast<int>(g.interior.size());
  Eigen::MatrixXd ft(N, M);
  for (int i = 0; i < N; ++i) {
    const int row = g.snapshots[static_cast<std::size_t>(i)];
    const auto p = ds.values.row(row);
    const Eigen::RowVectorXd pc = ds.companion_row(row);
    for (int m = 0; m < M; ++m) {
      const int j = g.interior[static_cast<std::size_t>(m)];
      const double time_term = (pc(j) - p(j)) / dt;
      double adv, dif;
      if (m == 0) {
        // one-sided O(dx^2) stencils at the left interior endpoint
        adv = (-3.0 * b[static_cast<std::size_t>(j)] * p(j) +
               4.0 * b[static_cast<std::size_t>(j + 1)] * p(j + 1) -
               b[static_cast<std::size_t>(j + 2)] * p(j + 2)) /
              (2.0 * dx);
        dif = (2.0 * p(j) - 5.0 * p(j + 1) + 4.0 * p(j + 2) - p(j + 3)) / (dx * dx);
      } else if (m == M - 1) {
        adv = (3.0 * b[static_cast<std::size_t>(j)] * p(j) -
               4.0 * b[static_cast<std::size_t>(j - 1)] * p(j - 1) +
               b[static_cast<std::size_t>(j - 2)] * p(j - 2)) /
              (2.0 * dx);
        dif = (2.0 * p(j) - 5.0 * p(j - 1) + 4.0 * p(j - 2) - p(j - 3)) / (dx * dx);
      } else {
        adv = (b[static_cast<std::size_t>(j + 1)] * p(j + 1) -
               b[static_cast<std::size_t>(j - 1)] * p(j - 1)) /
              (2.0 * dx);
        dif = (p(j + 1) - 2.0 * p(j) + p(j - 1)) / (dx * dx);
      }
      ft(i, m) = time_term + adv - 0.5 * opt.diffusion_sigma * opt.diffusion_sigma * dif;
    }
  }
  return ft;
}

QParts build_q(const DensityDataset& ds, const ProblemDomain& domain,
               const AssembleOptions& opt) {
  const auto g = layout(ds, domain, opt);
  const double dx = ds.x_step();
  const int N = static_cast<int>(g.snapshots.size());
  const int M = static_cast<int>(g.interior.size());

  QParts parts;
  parts.interior_indices = g.interior;
  parts.snapshot_rows = g.snapshots;
  parts.r_grid.resize(static_cast<std::size_t>(g.n_r));
  for (int k = 1; k <= g.n_r; ++k) parts.r_grid[static_cast<std::size_t>(k - 1)] = k * dx;

  parts.raw.resize(static_cast<Eigen::Index>(N) * M, g.n_r);
  const double scale = std::sqrt(dx / N);
  for (int i = 0; i < N; ++i) {
    const auto p = ds.values.row(g.snapshots[static_cast<std::size_t>(i)]);
    for (int m = 0; m < M; ++m) {
      const int j = g.interior[static_cast<std::size_t>(m)];
      const Eigen::Index row = static_cast<Eigen::Index>(i) * M + m;
      for (int k = 1; k <= g.n_r; ++k) {
        parts.raw(row, k - 1) = p(j + k) + p(j - k) - 2.0 * p(j);
      }
    }
  }
  parts.scaled = scale * parts.raw;
  return parts;
}

std::pair<Eigen::VectorXd, double> build_rho_hat(const Eigen::MatrixXd& raw_q, int n_snapshots,
                                                 double dx) {
  if (raw_q.size() == 0 || n_snapshots < 1) throw AssemblyError("rho: empty Q");
  Eigen::VectorXd sums = raw_q.cwiseAbs().colwise().sum() * (dx / n_snapshots);
  const double z = sums.sum() * dx;
  if (!(z > 0.0)) throw AssemblyError("rho: data explores nothing (all Q entries vanish)");
  return {Eigen::VectorXd(sums / z), z};
}

KernelParts build_kernel(const Eigen::MatrixXd& scaled_q, const Eigen::VectorXd& rho_hat) {
  if (scaled_q.cols() != rho_hat.size()) throw AssemblyError("kernel: Q/rho size mismatch");
  KernelParts parts;
  for (int k = 0; k < rho_hat.size(); ++k) {
    if (rho_hat(k) > 0.0) parts.kept_indices.push_back(k);
  }
  if (parts.kept_indices.empty()) throw AssemblyError("kernel: every exploration weight is zero");
  if (static_cast<int>(parts.kept_indices.size()) < rho_hat.size()) {
    std::fprintf(stderr, "[levyrkhs] warning: dropping %d r-grid entries with zero exploration\n",
                 static_cast<int>(rho_hat.size() - static_cast<int>(parts.kept_indices.size())));
  }
  const int n = static_cast<int>(parts.kept_indices.size());
  Eigen::MatrixXd qk(scaled_q.rows(), n);
  Eigen::VectorXd rk(n);
  for (int k = 0; k < n; ++k) {
    qk.col(k) = scaled_q.col(parts.kept_indices[static_cast<std::size_t>(k)]);
    rk(k) = rho_hat(parts.kept_indices[static_cast<std::size_t>(k)]);
  }
  Eigen::MatrixXd gram = qk.transpose() * qk;
  parts.Gbar = gram.cwiseQuotient(rk * rk.transpose());
  parts.Gbar = ((parts.Gbar + parts.Gbar.transpose()) * 0.5).eval();
  return parts;
}

RegressionSystem assemble(const DensityDataset& ds, const DriftSpec& drift,
                          const ProblemDomain& domain, const AssembleOptions& opt) {
  auto q = build_q(ds, domain, opt);
  const int N = static_cast<int>(q.snapshot_rows.size());
  const int M = static_cast<int>(q.interior_indices.size());
  const double dx = ds.x_step();

  auto [rho, z] = build_rho_hat(q.raw, N, dx);
  auto kernel = build_kernel(q.scaled, rho);

  RegressionSystem sys;
  sys.dr = dx;
  sys.n_snapshots = N;
  sys.n_interior = M;
  sys.snapshot_rows = q.snapshot_rows;
  sys.Z = z;
  sys.Gbar = std::move(kernel.Gbar);
  for (int j : q.interior_indices) {
    sys.interior_x.push_back(ds.x_grid[static_cast<std::size_t>(j)]);
  }

  const int n = static_cast<int>(kernel.kept_indices.size());
  sys.r_grid.resize(static_cast<std::size_t>(n));
  sys.rho_hat.resize(n);
  sys.Q.resize(q.scaled.rows(), n);
  for (int k = 0; k < n; ++k) {
    const int src = kernel.kept_indices[static_cast<std::size_t>(k)];
    sys.r_grid[static_cast<std::size_t>(k)] = q.r_grid[static_cast<std::size_t>(src)];
    sys.rho_hat(k) = rho(src);
    sys.Q.col(k) = q.scaled.col(src);
  }
  for (int k = 0; k < static_cast<int>(q.r_grid.size()); ++k) {
    if (std::find(kernel.kept_indices.begin(), kernel.kept_indices.end(), k) ==
        kernel.kept_indices.end()) {
      sys.dropped_r_indices.push_back(k);
    }
  }

  const Eigen::MatrixXd ft = compute_f_tilde(ds, drift, domain, opt);
  sys.f.resize(static_cast<Eigen::Index>(N) * M);
  const double scale = std::sqrt(dx / N);
  for (int i = 0; i < N; ++i) {
    for (int m = 0; m < M; ++m) {
      sys.f(static_cast<Eigen::Index>(i) * M + m) = scale * ft(i, m);
    }
  }
  return sys;
}

SystemSplit split_train_valid(std::shared_ptr<const RegressionSystem> sys, SplitPolicy policy) {
  if (!sys) throw AssemblyError("split: null system");
  if (sys->n_snapshots < 2) throw AssemblyError("split: need at least two snapshots");
  (void)policy;  // Interleave is the only policy

  SystemSplit split;
  split.full = sys;
  for (int i = 0; i < sys->n_snapshots; ++i) {
    (i % 2 == 0 ? split.train_snapshots : split.valid_snapshots).push_back(i);
  }

  const int M = sys->n_interior;
  auto gather = [&](const std::vector<int>& ids, Eigen::MatrixXd& q, Eigen::VectorXd& f) {
    q.resize(static_cast<Eigen::Index>(ids.size()) * M, sys->Q.cols());
    f.resize(static_cast<Eigen::Index>(ids.size()) * M);
    for (std::size_t b = 0; b < ids.size(); ++b) {
      const Eigen::Index dst = static_cast<Eigen::Index>(b) * M;
      const Eigen::Index src = static_cast<Eigen::Index>(ids[b]) * M;
      q.middleRows(dst, M) = sys->Q.middleRows(src, M);
      f.segment(dst, M) = sys->f.segment(src, M);
    }
  };
  gather(split.train_snapshots, split.Q_train, split.f_train);
  gather(split.valid_snapshots, split.Q_valid, split.f_valid);
  split.A_train = split.Q_train * sys->Gbar * sys->dr;
  split.A_valid = split.Q_valid * sys->Gbar * sys->dr;
  return split;
}

}  // namespace levyrkhs
