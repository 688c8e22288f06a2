#include "levyrkhs/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "levyrkhs/assembly.hpp"
#include "levyrkhs/dataset.hpp"
#include "levyrkhs/ensemble.hpp"
#include "levyrkhs/errors.hpp"
#include "levyrkhs/fpe.hpp"
#include "levyrkhs/hyperselect.hpp"
#include "levyrkhs/metrics.hpp"
#include "levyrkhs/model.hpp"

namespace levyrkhs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ResolvedConfig {
  json raw;
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::string run_id;

  ProblemDomain domain;
  DriftSpec drift = LinearDrift{-0.5};
  LevyDensitySpec levy = GaussianDecay{};

  FpeConfig fpe;
  EnsembleConfig ensemble;
  KdeConfig kde;
  bool dump_raw_samples = false;

  std::string generator = "fpe";  // or "ensemble" or "" (file input)
  std::string data_csv, data_sidecar;

  double diffusion_sigma = -1.0;  // -1: auto (0 for KDE-sourced data, 1 otherwise)

  std::string method = "bilevel";
  PenaltyNormKind norm = PenaltyNormKind::Rkhs;
  BilevelConfig bilevel;
  std::vector<double> mesh_set;
  int skip_initial_snapshots = -1;  // -1: auto (1 for KDE data, 0 otherwise)
};

const std::vector<std::string> kExperiments = {"fpe-generate", "ensemble-generate", "assemble",
                                               "estimate",     "convergence-study",
                                               "norm-comparison"};

void parse_model(const json& j, ResolvedConfig& cfg, std::vector<std::string>& errors) {
  cfg.domain.half_width = j.value("half_width", 5.0);
  cfg.domain.support_radius = j.value("support_radius", 2.0);
  cfg.domain.dx = j.value("dx", 0.01);
  cfg.diffusion_sigma = j.value("diffusion_sigma", -1.0);
  if (j.contains("drift")) {
    const auto& d = j.at("drift");
    const std::string type = d.value("type", "linear");
    if (type == "linear") {
      cfg.drift = LinearDrift{d.value("slope", -0.5)};
    } else if (type == "sine") {
      cfg.drift = SineDrift{};
    } else if (type == "tabulated") {
      cfg.drift = TabulatedFn{d.value("x", std::vector<double>{}),
                              d.value("values", std::vector<double>{})};
    } else {
      errors.push_back("/model/drift/type: unknown variant '" + type + "'");
    }
  }
  if (j.contains("levy")) {
    const auto& l = j.at("levy");
    const std::string type = l.value("type", "gaussian");
    if (type == "gaussian") {
      cfg.levy = GaussianDecay{};
    } else if (type == "exponential") {
      cfg.levy = ExponentialDecay{};
    } else if (type == "tabulated") {
      cfg.levy = TabulatedFn{l.value("r", std::vector<double>{}),
                             l.value("values", std::vector<double>{})};
    } else {
      errors.push_back("/model/levy/type: unknown variant '" + type + "'");
    }
  }
}

ResolvedConfig parse_config(const json& j, std::vector<std::string>& errors) {
  ResolvedConfig cfg;
  cfg.raw = j;
  cfg.experiment = j.value("experiment", "");
  if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end()) {
    errors.push_back("/experiment: must be one of fpe-generate, ensemble-generate, assemble, "
                     "estimate, convergence-study, norm-comparison");
  }
  cfg.seed = j.value("seed", 0ull);
  cfg.output_dir = j.value("output_dir", "out");
  cfg.run_id = j.value("run_id", "");

  if (j.contains("model")) parse_model(j.at("model"), cfg, errors);

  if (j.contains("fpe")) {
    const auto& f = j.at("fpe");
    cfg.fpe.solver_dx = f.value("solver_dx", 0.005);
    cfg.fpe.solver_dt = f.value("solver_dt", 2.5e-5);
    cfg.fpe.horizon = f.value("horizon", 1.0);
    cfg.fpe.n_snapshots = f.value("n_snapshots", 30);
    cfg.fpe.ic_std = f.value("ic_std", 0.5);
    const std::string mode = f.value("time_difference", "solver");
    if (mode == "observation") {
      cfg.fpe.time_difference = TimeDifferenceMode::Observation;
    } else if (mode == "solver") {
      cfg.fpe.time_difference = TimeDifferenceMode::Solver;
    } else {
      errors.push_back("/fpe/time_difference: must be 'observation' or 'solver'");
    }
  }
  cfg.fpe.domain = cfg.domain;

  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    cfg.ensemble.n_paths = e.value("n_paths", 100000ull);
    cfg.ensemble.dt = e.value("dt", 0.05);
    cfg.ensemble.horizon = e.value("horizon", 5.0);
    cfg.dump_raw_samples = e.value("dump_samples", false);
  }
  cfg.ensemble.seed = cfg.seed;
  cfg.ensemble.drift = cfg.drift;
  try {
    cfg.ensemble.jump = jump_law_for(cfg.levy);
  } catch (const std::exception&) {
    if (cfg.experiment == "ensemble-generate" ||
        (cfg.experiment == "estimate" && j.value("data", json::object()).value("generator", "") ==
                                             std::string("ensemble"))) {
      errors.push_back("/model/levy: ensemble generation needs a gaussian or exponential density");
    }
  }

  if (j.contains("kde")) {
    const auto& k = j.at("kde");
    cfg.kde.bandwidth_constant = k.value("bandwidth_constant", 0.5);
    cfg.kde.smoothing_window = k.value("window", 11);
    cfg.kde.smoothing_order = k.value("order", 3);
  }

  if (j.contains("data")) {
    const auto& d = j.at("data");
    cfg.generator = d.value("generator", "");
    cfg.data_csv = d.value("csv", "");
    cfg.data_sidecar = d.value("sidecar", "");
    if (cfg.generator.empty() && cfg.data_csv.empty()) {
      errors.push_back("/data: provide either a generator or csv/sidecar paths");
    }
    if (!cfg.generator.empty() && cfg.generator != "fpe" && cfg.generator != "ensemble") {
      errors.push_back("/data/generator: must be 'fpe' or 'ensemble'");
    }
    if (!cfg.data_csv.empty()) {
      if (cfg.data_sidecar.empty()) {
        errors.push_back("/data/sidecar: required when csv is given");
      } else {
        if (!fs::exists(cfg.data_csv)) errors.push_back("/data/csv: file not found: " + cfg.data_csv);
        if (!fs::exists(cfg.data_sidecar)) {
          errors.push_back("/data/sidecar: file not found: " + cfg.data_sidecar);
        }
      }
    }
  }

  cfg.method = j.value("method", "bilevel");
  if (cfg.method != "bilevel" && cfg.method != "lcurve" && cfg.method != "gcv") {
    errors.push_back("/method: must be 'bilevel', 'lcurve' or 'gcv'");
  }
  const std::string norm = j.value("norm", "rkhs");
  if (norm == "rkhs") {
    cfg.norm = PenaltyNormKind::Rkhs;
  } else if (norm == "l2rho") {
    cfg.norm = PenaltyNormKind::L2Rho;
  } else if (norm == "l2") {
    cfg.norm = PenaltyNormKind::Euclidean;
  } else {
    errors.push_back("/norm: must be 'rkhs', 'l2rho' or 'l2'");
  }

  if (j.contains("bilevel")) {
    const auto& b = j.at("bilevel");
    cfg.bilevel.eta0 = b.value("eta0", 0.004);
    cfg.bilevel.momentum = b.value("momentum", 0.99);
    cfg.bilevel.max_iters = b.value("max_iters", 300);
    cfg.bilevel.grad_eps = b.value("grad_eps", 1e-8);
    cfg.bilevel.stop_window = b.value("stop_window", 20);
    cfg.bilevel.tol_gamma = b.value("tol_gamma", 1e-4);
    cfg.bilevel.tol_loss = b.value("tol_loss", 1e-8);
    cfg.bilevel.gamma0 = b.value("gamma0", 0.0);
    cfg.bilevel.v0 = b.value("v0", 0.0);
  }

  cfg.mesh_set = j.value("mesh_set", std::vector<double>{0.01, 0.02, 0.025, 0.05});
  cfg.skip_initial_snapshots = j.value("skip_initial_snapshots", -1);

  try {
    cfg.domain.validate();
  } catch (const std::exception& e) {
    errors.push_back(std::string("/model: ") + e.what());
  }
  if (errors.empty() &&
      (cfg.experiment == "fpe-generate" || cfg.generator == "fpe")) {
    try {
      cfg.fpe.validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("/fpe: ") + e.what());
    }
  }
  if (errors.empty() &&
      (cfg.experiment == "ensemble-generate" || cfg.generator == "ensemble")) {
    try {
      cfg.ensemble.validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("/ensemble: ") + e.what());
    }
  }
  if (cfg.run_id.empty()) cfg.run_id = fnv1a_hex(j.dump());
  return cfg;
}

// ---------------------------------------------------------------------------
// output helpers

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << content;
}

void write_trace_csv(const fs::path& path, const BilevelTrace& trace) {
  std::ostringstream os;
  os << "k,gamma,loss,v,grad\n";
  for (const auto& r : trace.records) {
    os << r.k << ',' << fmt_double(r.gamma) << ',' << fmt_double(r.loss) << ','
       << fmt_double(r.v) << ',' << fmt_double(r.grad) << '\n';
  }
  write_file(path, os.str());
}

void write_estimate_csv(const fs::path& path, const RegressionSystem& sys,
                        const Eigen::VectorXd& phi_hat, const Eigen::VectorXd& phi_true) {
  std::ostringstream os;
  os << "r,phi_hat,phi_true,rho_hat\n";
  for (int k = 0; k < sys.n_basis(); ++k) {
    os << fmt_double(sys.r_grid[static_cast<std::size_t>(k)]) << ',' << fmt_double(phi_hat(k))
       << ',' << fmt_double(phi_true(k)) << ',' << fmt_double(sys.rho_hat(k)) << '\n';
  }
  write_file(path, os.str());
}

struct EstimateOutcome {
  EstimateResult result;
  BilevelTrace trace;
  bool has_trace = false;
  StopReason stop_reason = StopReason::MaxIters;
  std::shared_ptr<const RegressionSystem> system;
  Eigen::VectorXd phi_true;
};

Eigen::VectorXd true_phi_on_grid(const LevyDensitySpec& levy, const RegressionSystem& sys) {
  Eigen::VectorXd phi(sys.n_basis());
  for (int k = 0; k < sys.n_basis(); ++k) {
    phi(k) = eval_levy_density(levy, sys.r_grid[static_cast<std::size_t>(k)]);
  }
  return phi;
}

EstimateOutcome run_estimate_core(const DensityDataset& ds, const ProblemDomain& domain,
                                  const ResolvedConfig& cfg) {
  AssembleOptions opt;
  opt.first_snapshot = cfg.skip_initial_snapshots >= 0
                           ? cfg.skip_initial_snapshots
                           : (ds.source == DatasetSource::Kde ? 1 : 0);
  opt.diffusion_sigma = cfg.diffusion_sigma >= 0.0
                            ? cfg.diffusion_sigma
                            : (ds.source == DatasetSource::Kde ? 0.0 : 1.0);
  auto sys = std::make_shared<const RegressionSystem>(assemble(ds, cfg.drift, domain, opt));
  const SystemSplit split = split_train_valid(sys);

  EstimateOutcome out;
  out.system = sys;
  if (cfg.method == "bilevel") {
    BilevelResult res = bilevel_optimize(split, cfg.norm, cfg.bilevel);
    out.result.lambda = res.lambda;
    out.result.c = std::move(res.c);
    out.trace = std::move(res.trace);
    out.has_trace = true;
    out.stop_reason = out.trace.stop_reason;
  } else {
    const auto grid = default_lambda_grid();
    const SelectionResult sel = cfg.method == "lcurve" ? lcurve_select(split, cfg.norm, grid)
                                                       : gcv_select(split, cfg.norm, grid);
    out.result.lambda = sel.lambda;
    out.result.c = sel.c;
  }
  out.result.method = cfg.method;
  out.result.norm = penalty_norm_name(cfg.norm);
  out.result.phi_hat = eval_phi(*sys, out.result.c);
  out.phi_true = true_phi_on_grid(cfg.levy, *sys);
  const std::vector<double> rho(sys->rho_hat.data(), sys->rho_hat.data() + sys->rho_hat.size());
  const std::vector<double> ph(out.result.phi_hat.data(),
                               out.result.phi_hat.data() + out.result.phi_hat.size());
  const std::vector<double> pt(out.phi_true.data(), out.phi_true.data() + out.phi_true.size());
  const L2RhoError err = l2rho_error(ph, pt, rho, sys->dr);
  out.result.abs_error = err.absolute;
  out.result.rel_error = err.relative;
  out.result.loss = (split.A_valid * out.result.c - split.f_valid).squaredNorm();
  return out;
}

DensityDataset obtain_dataset(const ResolvedConfig& cfg, json& manifest) {
  if (!cfg.data_csv.empty()) {
    manifest["data"] = {{"csv", cfg.data_csv}, {"sidecar", cfg.data_sidecar}};
    return load_dataset(cfg.data_csv, cfg.data_sidecar);
  }
  if (cfg.generator == "ensemble") {
    KdeConfig kde = cfg.kde;
    const int n_nodes =
        static_cast<int>(std::lround(2.0 * cfg.domain.half_width / cfg.domain.dx)) + 1;
    kde.grid.resize(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      kde.grid[static_cast<std::size_t>(i)] = -cfg.domain.half_width + i * cfg.domain.dx;
    }
    KdeBuildInfo info;
    DensityDataset ds = build_kde_dataset(cfg.ensemble, kde, &info);
    manifest["data"] = {{"generator", "ensemble"},
                        {"bandwidth", info.bandwidth},
                        {"clamped_negative_values", info.clamped_negative_values}};
    return ds;
  }
  DensityDataset ds = solve_fpe(cfg.drift, cfg.levy, cfg.fpe);
  manifest["data"] = {{"generator", "fpe"},
                      {"effective_dt", cfg.fpe.effective_dt()},
                      {"initial_condition", cfg.fpe.initial_condition.empty()
                                                ? "gaussian(std=" + fmt_double(cfg.fpe.ic_std) +
                                                      "), renormalized on the solver grid"
                                                : "user-supplied"}};
  return ds;
}

json result_json(const EstimateOutcome& out) {
  json r;
  r["method"] = out.result.method;
  r["norm"] = out.result.norm;
  r["lambda"] = out.result.lambda;
  r["loss"] = out.result.loss;
  r["abs_error"] = out.result.abs_error;
  r["rel_error"] = out.result.rel_error;
  if (out.has_trace) {
    r["iterations"] = out.trace.records.size();
    r["stop_reason"] =
        out.stop_reason == StopReason::ConvergedWindow ? "converged-window" : "max-iters";
  }
  if (!out.system->dropped_r_indices.empty()) {
    r["dropped_r_indices"] = out.system->dropped_r_indices;
  }
  return r;
}

void write_estimate_outputs(const fs::path& dir, const EstimateOutcome& out) {
  write_estimate_csv(dir / "estimate.csv", *out.system, out.result.phi_hat, out.phi_true);
  if (out.has_trace) write_trace_csv(dir / "trace.csv", out.trace);
}

std::string errors_csv_header() { return "label,method,norm,dx,lambda,loss,abs_error,rel_error\n"; }

std::string errors_csv_row(const std::string& label, const EstimateOutcome& out, double dx) {
  std::ostringstream os;
  os << label << ',' << out.result.method << ',' << out.result.norm << ',' << fmt_double(dx)
     << ',' << fmt_double(out.result.lambda) << ',' << fmt_double(out.result.loss) << ','
     << fmt_double(out.result.abs_error) << ',' << fmt_double(out.result.rel_error) << '\n';
  return os.str();
}

void save_system_dir(const RegressionSystem& sys, const fs::path& dir) {
  fs::create_directories(dir);
  auto write_bin = [&](const fs::path& p, const Eigen::MatrixXd& m) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + p.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
  };
  write_bin(dir / "Q.bin", sys.Q);
  write_bin(dir / "Gbar.bin", sys.Gbar);

  json shapes;
  shapes["layout"] = "row-major-float64";
  shapes["Q"] = {{"rows", sys.Q.rows()}, {"cols", sys.Q.cols()}};
  shapes["Gbar"] = {{"rows", sys.Gbar.rows()}, {"cols", sys.Gbar.cols()}};
  shapes["dr"] = sys.dr;
  shapes["Z"] = sys.Z;
  shapes["n_snapshots"] = sys.n_snapshots;
  shapes["n_interior"] = sys.n_interior;
  shapes["dropped_r_indices"] = sys.dropped_r_indices;
  write_file(dir / "shapes.json", shapes.dump(2) + "\n");

  std::ostringstream f_os;
  f_os << "row,f\n";
  for (Eigen::Index i = 0; i < sys.f.size(); ++i) {
    f_os << i << ',' << fmt_double(sys.f(i)) << '\n';
  }
  write_file(dir / "f.csv", f_os.str());

  std::ostringstream r_os;
  r_os << "r,rho_hat\n";
  for (int k = 0; k < sys.n_basis(); ++k) {
    r_os << fmt_double(sys.r_grid[static_cast<std::size_t>(k)]) << ','
         << fmt_double(sys.rho_hat(k)) << '\n';
  }
  write_file(dir / "rho.csv", r_os.str());
}

int run_resolved(const ResolvedConfig& cfg) {
  const fs::path run_dir = fs::path(cfg.output_dir) / cfg.experiment / cfg.run_id;
  fs::create_directories(run_dir);

  json manifest;
  manifest["config"] = cfg.raw;
  manifest["experiment"] = cfg.experiment;
  manifest["run_id"] = cfg.run_id;
  manifest["seed"] = cfg.seed;
  manifest["versions"] = {{"levyrkhs", "0.1.0"},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["timestamp_utc"] = now_utc();
  Stopwatch watch;

  if (cfg.experiment == "fpe-generate") {
    const DensityDataset ds = solve_fpe(cfg.drift, cfg.levy, cfg.fpe);
    json prov;
    prov["generator"] = "fpe";
    prov["config"] = cfg.raw;
    prov["effective_dt"] = cfg.fpe.effective_dt();
    prov["initial_condition"] = cfg.fpe.initial_condition.empty()
                                    ? "gaussian(std=" + fmt_double(cfg.fpe.ic_std) +
                                          "), renormalized on the solver grid"
                                    : "user-supplied";
    save_dataset(ds, (run_dir / "dataset.csv").string(), (run_dir / "dataset.json").string(),
                 prov.dump());
    manifest["results"] = {{"n_times", ds.n_rows()}, {"n_x", ds.n_x()}};
  } else if (cfg.experiment == "ensemble-generate") {
    json data_info;
    ResolvedConfig gen_cfg = cfg;
    gen_cfg.generator = "ensemble";
    gen_cfg.data_csv.clear();
    const DensityDataset ds = obtain_dataset(gen_cfg, data_info);
    json prov;
    prov["generator"] = "ensemble";
    prov["config"] = cfg.raw;
    prov["kde"] = data_info["data"];
    save_dataset(ds, (run_dir / "dataset.csv").string(), (run_dir / "dataset.json").string(),
                 prov.dump());
    if (cfg.dump_raw_samples) {
      dump_samples(simulate_ensemble(cfg.ensemble), (run_dir / "samples.bin").string());
    }
    manifest["results"] = {{"n_times", ds.n_rows()}, {"n_x", ds.n_x()}};
    manifest["data"] = data_info["data"];
  } else if (cfg.experiment == "assemble") {
    const DensityDataset ds = obtain_dataset(cfg, manifest);
    AssembleOptions opt;
    opt.first_snapshot = cfg.skip_initial_snapshots >= 0
                             ? cfg.skip_initial_snapshots
                             : (ds.source == DatasetSource::Kde ? 1 : 0);
    opt.diffusion_sigma = cfg.diffusion_sigma >= 0.0
                              ? cfg.diffusion_sigma
                              : (ds.source == DatasetSource::Kde ? 0.0 : 1.0);
    const RegressionSystem sys = assemble(ds, cfg.drift, cfg.domain, opt);
    save_system_dir(sys, run_dir / "system");
    manifest["results"] = {{"rows", sys.Q.rows()},
                           {"n_basis", sys.n_basis()},
                           {"dropped_r_indices", sys.dropped_r_indices}};
  } else if (cfg.experiment == "estimate") {
    const DensityDataset ds = obtain_dataset(cfg, manifest);
    const EstimateOutcome out = run_estimate_core(ds, cfg.domain, cfg);
    write_estimate_outputs(run_dir, out);
    write_file(run_dir / "errors.csv",
               errors_csv_header() + errors_csv_row("estimate", out, cfg.domain.dx));
    manifest["results"] = result_json(out);
  } else if (cfg.experiment == "convergence-study") {
    const DensityDataset native = solve_fpe_native(cfg.drift, cfg.levy, cfg.fpe);
    manifest["data"] = {{"generator", "fpe"}, {"effective_dt", cfg.fpe.effective_dt()}};
    std::vector<std::future<EstimateOutcome>> futures;
    for (double dx : cfg.mesh_set) {
      futures.push_back(std::async(std::launch::async, [&, dx]() {
        ResolvedConfig sub = cfg;
        sub.domain.dx = dx;
        const DensityDataset ds = subsample_dataset(native, dx);
        return run_estimate_core(ds, sub.domain, sub);
      }));
    }
    std::string table = errors_csv_header();
    std::vector<std::pair<double, double>> points;
    json runs = json::array();
    for (std::size_t i = 0; i < futures.size(); ++i) {
      const EstimateOutcome out = futures[i].get();
      const double dx = cfg.mesh_set[i];
      const std::string label = "dx=" + fmt_double(dx);
      const fs::path sub = run_dir / ("dx-" + fmt_double(dx));
      fs::create_directories(sub);
      write_estimate_outputs(sub, out);
      table += errors_csv_row(label, out, dx);
      points.emplace_back(dx, out.result.rel_error);
      json r = result_json(out);
      r["dx"] = dx;
      runs.push_back(r);
    }
    write_file(run_dir / "errors.csv", table);
    manifest["results"]["runs"] = runs;
    manifest["results"]["slope"] = convergence_slope(points);
  } else if (cfg.experiment == "norm-comparison") {
    const DensityDataset ds = obtain_dataset(cfg, manifest);
    const std::vector<PenaltyNormKind> norms = {PenaltyNormKind::Rkhs, PenaltyNormKind::L2Rho,
                                                PenaltyNormKind::Euclidean};
    std::vector<std::future<EstimateOutcome>> futures;
    for (PenaltyNormKind norm : norms) {
      futures.push_back(std::async(std::launch::async, [&, norm]() {
        ResolvedConfig sub = cfg;
        sub.norm = norm;
        return run_estimate_core(ds, sub.domain, sub);
      }));
    }
    std::string table = errors_csv_header();
    json runs = json::array();
    for (std::size_t i = 0; i < futures.size(); ++i) {
      const EstimateOutcome out = futures[i].get();
      const std::string label = penalty_norm_name(norms[i]);
      const fs::path sub = run_dir / ("norm-" + label);
      fs::create_directories(sub);
      write_estimate_outputs(sub, out);
      table += errors_csv_row(label, out, cfg.domain.dx);
      runs.push_back(result_json(out));
    }
    write_file(run_dir / "errors.csv", table);
    manifest["results"]["runs"] = runs;
  }

  manifest["timing_ms"] = watch.ms();
  write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
  std::printf("%s\n", (run_dir / "manifest.json").string().c_str());
  return 0;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return json::parse(in);  // parse errors carry byte positions
}

}  // namespace

std::vector<std::string> validate_config_file(const std::string& config_path) {
  std::vector<std::string> errors;
  json j;
  try {
    j = load_json(config_path);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
    return errors;
  }
  parse_config(j, errors);
  return errors;
}

int run_config_file(const std::string& config_path) {
  try {
    const json j = load_json(config_path);
    std::vector<std::string> errors;
    const ResolvedConfig cfg = parse_config(j, errors);
    if (!errors.empty()) {
      for (const auto& e : errors) std::fprintf(stderr, "config error: %s\n", e.c_str());
      return 2;
    }
    return run_resolved(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace levyrkhs
