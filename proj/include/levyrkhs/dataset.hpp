#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "levyrkhs/model.hpp"

namespace levyrkhs {

enum class DatasetSource { Fpe, Kde };

/// Time-indexed density snapshots on a uniform spatial grid.
///
/// `values.row(i)` holds p(., times[i]).  Forward time differences for row i
/// use `companions.row(i)` when present (taken companion_dt after times[i]),
/// otherwise the next stored row (companion_dt == dt_obs).  The last row is
/// reserved as a companion in either layout, so n_snapshots() == n_rows()-1.
struct DensityDataset {
  std::vector<double> x_grid;
  std::vector<double> times;
  double dt_obs = 0.0;
  double companion_dt = 0.0;
  Eigen::MatrixXd values;  // times.size() x x_grid.size()
  std::optional<Eigen::MatrixXd> companions;
  DatasetSource source = DatasetSource::Fpe;

  int n_rows() const { return static_cast<int>(times.size()); }
  int n_x() const { return static_cast<int>(x_grid.size()); }
  int n_snapshots() const { return n_rows() - 1; }
  double x_step() const;

  /// Density values one companion_dt after times[i].
  Eigen::RowVectorXd companion_row(int i) const;

  /// Shape/monotonicity checks plus per-row mass within mass_tol of 1
  /// (mass check applied to FPE-sourced data only; KDE rows may lose mass
  /// to domain truncation).  Throws ConfigError on violation.
  void validate(double mass_tol = 1e-3) const;
};

/// Keep every stride-th spatial node so the grid spacing becomes target_dx.
/// target_dx must be an integer multiple of the current spacing; retained
/// values are copied bit-exactly.
DensityDataset subsample_dataset(const DensityDataset& ds, double target_dx);

/// CSV layout: header "time,x0,x1,..."; one row per stored snapshot.  The
/// sidecar JSON carries grid metadata, companion_dt and a free-form
/// description of how the data was produced.  Companion rows, when distinct
/// from the stored rows, go to `<csv_path stem>_companion.csv`.
void save_dataset(const DensityDataset& ds, const std::string& csv_path,
                  const std::string& sidecar_path,
                  const std::string& provenance_json = "{}");

DensityDataset load_dataset(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace levyrkhs
