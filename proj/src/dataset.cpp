#include "levyrkhs/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "levyrkhs/errors.hpp"

namespace levyrkhs {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const std::vector<double>& times,
                      const std::vector<double>& x_grid, const Eigen::MatrixXd& m,
                      double time_shift) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "time";
  for (double x : x_grid) out << ',' << fmt_double(x);
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << fmt_double(times[static_cast<std::size_t>(i)] + time_shift);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << fmt_double(m(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, std::vector<double>& times,
                                std::vector<double>& x_grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset csv: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // "time"
    while (std::getline(ss, cell, ',')) x_grid.push_back(std::stod(cell));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    times.push_back(std::stod(cell));
    std::vector<double> row;
    row.reserve(x_grid.size());
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != x_grid.size()) throw ConfigError("ragged dataset csv: " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(x_grid.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < x_grid.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::string companion_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const std::string stem = dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
  const std::string ext = dot == std::string::npos ? "" : csv_path.substr(dot);
  return stem + "_companion" + ext;
}

}  // namespace

double DensityDataset::x_step() const {
  if (x_grid.size() < 2) throw ConfigError("dataset: x grid needs >= 2 nodes");
  return x_grid[1] - x_grid[0];
}

Eigen::RowVectorXd DensityDataset::companion_row(int i) const {
  if (companions) {
    return companions->row(i);
  }
  if (i + 1 >= n_rows()) {
    throw ConfigError("dataset: row " + std::to_string(i) + " has no companion row");
  }
  return values.row(i + 1);
}

void DensityDataset::validate(double mass_tol) const {
  if (n_rows() < 2 && !companions) throw ConfigError("dataset: need at least two rows");
  if (values.rows() != n_rows() || values.cols() != n_x()) {
    throw ConfigError("dataset: value matrix shape mismatch");
  }
  if (companions && (companions->rows() != n_rows() || companions->cols() != n_x())) {
    throw ConfigError("dataset: companion matrix shape mismatch");
  }
  const double dxg = x_step();
  for (std::size_t j = 1; j < x_grid.size(); ++j) {
    if (std::abs((x_grid[j] - x_grid[j - 1]) - dxg) > 1e-9 * std::max(1.0, std::abs(dxg))) {
      throw ConfigError("dataset: x grid not uniform");
    }
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt_obs) > 1e-9 * std::max(1.0, dt_obs)) {
      throw ConfigError("dataset: snapshot times not uniformly spaced");
    }
  }
  if (values.minCoeff() < 0.0) throw ConfigError("dataset: negative density value");
  if (source == DatasetSource::Fpe) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double mass = values.row(i).sum() * dxg;
      if (std::abs(mass - 1.0) > mass_tol) {
        throw ConfigError("dataset: row " + std::to_string(i) + " mass " + fmt_double(mass) +
                          " deviates from 1 beyond tolerance");
      }
    }
  }
}

DensityDataset subsample_dataset(const DensityDataset& ds, double target_dx) {
  const double cur = ds.x_step();
  const double ratio = target_dx / cur;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    throw ConfigError("subsample: target dx must be an integer multiple of the current spacing");
  }
  if (stride == 1) return ds;
  const int kept = (ds.n_x() - 1) / static_cast<int>(stride) + 1;
  DensityDataset out;
  out.times = ds.times;
  out.dt_obs = ds.dt_obs;
  out.companion_dt = ds.companion_dt;
  out.source = ds.source;
  out.x_grid.resize(static_cast<std::size_t>(kept));
  out.values.resize(ds.values.rows(), kept);
  for (int j = 0; j < kept; ++j) {
    const int src = j * static_cast<int>(stride);
    out.x_grid[static_cast<std::size_t>(j)] = ds.x_grid[static_cast<std::size_t>(src)];
    out.values.col(j) = ds.values.col(src);
  }
  if (ds.companions) {
    Eigen::MatrixXd comp(ds.companions->rows(), kept);
    for (int j = 0; j < kept; ++j) comp.col(j) = ds.companions->col(j * static_cast<int>(stride));
    out.companions = std::move(comp);
  }
  return out;
}

void save_dataset(const DensityDataset& ds, const std::string& csv_path,
                  const std::string& sidecar_path, const std::string& provenance_json) {
  write_matrix_csv(csv_path, ds.times, ds.x_grid, ds.values, 0.0);
  if (ds.companions) {
    write_matrix_csv(companion_path(csv_path), ds.times, ds.x_grid, *ds.companions,
                     ds.companion_dt);
  }
  nlohmann::json meta;
  meta["kind"] = "density-dataset";
  meta["source"] = ds.source == DatasetSource::Fpe ? "fpe" : "kde";
  meta["n_times"] = ds.n_rows();
  meta["n_x"] = ds.n_x();
  meta["x0"] = ds.x_grid.front();
  meta["x_step"] = ds.x_step();
  meta["dt_obs"] = ds.dt_obs;
  meta["companion_dt"] = ds.companion_dt;
  meta["has_companion_file"] = ds.companions.has_value();
  meta["provenance"] = nlohmann::json::parse(provenance_json);
  std::ofstream out(sidecar_path);
  if (!out) throw ConfigError("cannot open for writing: " + sidecar_path);
  out << meta.dump(2) << '\n';
}

DensityDataset load_dataset(const std::string& csv_path, const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw ConfigError("cannot open for reading: " + sidecar_path);
  nlohmann::json meta = nlohmann::json::parse(in);

  DensityDataset ds;
  ds.values = read_matrix_csv(csv_path, ds.times, ds.x_grid);
  ds.dt_obs = meta.at("dt_obs").get<double>();
  ds.companion_dt = meta.at("companion_dt").get<double>();
  ds.source = meta.at("source").get<std::string>() == "kde" ? DatasetSource::Kde
                                                            : DatasetSource::Fpe;
  if (meta.value("has_companion_file", false)) {
    std::vector<double> ctimes;
    std::vector<double> cgrid;
    ds.companions = read_matrix_csv(companion_path(csv_path), ctimes, cgrid);
  }
  return ds;
}

}  // namespace levyrkhs
