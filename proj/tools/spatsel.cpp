// spatsel command line: mesh / fit / select / predict / simulate / report.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spatsel/csv.hpp"
#include "spatsel/diagnostics.hpp"
#include "spatsel/errors.hpp"
#include "spatsel/gmrf.hpp"
#include "spatsel/ingest.hpp"
#include "spatsel/manifest.hpp"
#include "spatsel/mesh.hpp"
#include "spatsel/sampler.hpp"
#include "spatsel/selection.hpp"
#include "spatsel/simulate.hpp"

namespace fs = std::filesystem;
using namespace spatsel;

namespace {

struct CommonOpts {
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;
};

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw data_error("cannot create output directory " + dir);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open " + path + " for writing");
  return out;
}

SpatialScale parse_scale(const std::string& s) {
  if (s == "sqrt_r") return SpatialScale::sqrt_r;
  if (s == "r") return SpatialScale::r;
  throw config_error("spatial-scale must be sqrt_r or r");
}

RmseMode parse_rmse_mode(const std::string& s) {
  if (s == "mean") return RmseMode::mean;
  if (s == "sum") return RmseMode::sum;
  throw config_error("rmse-mode must be mean or sum");
}

std::string config_digest_of(const CLI::App& app) {
  return fnv1a_hex(app.config_to_str(true, false));
}

// ---------------------------------------------------------------- mesh ----

struct MeshArgs {
  std::string sites_path;
  double edge = 0.0;  // 0: extent/40
  double extension = -1.0;
  CommonOpts common;
};

int cmd_mesh(const MeshArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "mesh";
  manifest.config_digest = cfg_digest;
  manifest.started = iso_timestamp();
  manifest.inputs[args.sites_path] = digest_file(args.sites_path);

  const CsvTable table = read_csv_file(args.sites_path);
  const int cx = table.col("x"), cy = table.col("y");
  if (cx < 0 || cy < 0) throw data_error("mesh: sites file needs x and y columns");
  Points sites(static_cast<Eigen::Index>(table.n_rows()), 2);
  for (size_t i = 0; i < table.n_rows(); ++i) {
    sites(static_cast<Eigen::Index>(i), 0) =
        parse_numeric_cell(table.rows[i][static_cast<size_t>(cx)], i + 2, "x");
    sites(static_cast<Eigen::Index>(i), 1) =
        parse_numeric_cell(table.rows[i][static_cast<size_t>(cy)], i + 2, "y");
  }

  const double extent = std::max(sites.col(0).maxCoeff() - sites.col(0).minCoeff(),
                                 sites.col(1).maxCoeff() - sites.col(1).minCoeff());
  const double edge = args.edge > 0.0 ? args.edge : extent / 40.0;
  const double ext = args.extension >= 0.0 ? args.extension : default_extension(sites);
  const Mesh mesh = build_mesh(sites, edge, ext);

  ensure_out_dir(args.common.out_dir);
  const std::string mesh_path = args.common.out_dir + "/mesh.txt";
  save_mesh(mesh, mesh_path);
  std::cerr << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_triangles()
            << " triangles (edge " << edge << ", extension " << ext << ")\n";

  manifest.outputs.push_back(mesh_path);
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  return 0;
}

// ----------------------------------------------------------------- fit ----

struct FitArgs {
  std::string data_path;
  std::string sites_path;
  DatasetSchema schema;
  std::string transform = "iterated-log";
  bool no_standardize = false;
  double mesh_edge = 0.0;
  double mesh_extension = -1.0;
  ModelConfig model;
  std::string spatial_scale = "sqrt_r";
  bool no_adapt = false;
  CommonOpts common;
};

int cmd_fit(const FitArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "fit";
  manifest.config_digest = cfg_digest;
  manifest.seed = args.model.seed;
  manifest.started = iso_timestamp();
  manifest.inputs[args.data_path] = digest_file(args.data_path);
  if (!args.sites_path.empty() && args.sites_path != args.data_path)
    manifest.inputs[args.sites_path] = digest_file(args.sites_path);

  LoadReport load_report;
  SpatialDataset data = load_dataset(args.sites_path, args.data_path, args.schema, &load_report);
  std::cerr << "loaded " << load_report.kept << " of " << load_report.rows_in << " rows ("
            << load_report.dropped_missing_covariate << " missing covariates, "
            << load_report.dropped_missing_response << " unusable responses, "
            << load_report.dropped_missing_coords << " missing coordinates); "
            << load_report.censored_pct << "% censored\n";

  if (args.transform == "iterated-log")
    apply_response_transform(data);
  else if (args.transform != "none")
    throw config_error("transform must be iterated-log or none");

  Standardization st;
  st.means = Eigen::VectorXd::Zero(data.p());
  st.sds = Eigen::VectorXd::Ones(data.p());
  if (!args.no_standardize) st = standardize_covariates(data.X, data.has_intercept);

  const double extent = std::max(data.sites.col(0).maxCoeff() - data.sites.col(0).minCoeff(),
                                 data.sites.col(1).maxCoeff() - data.sites.col(1).minCoeff());
  const double edge = args.mesh_edge > 0.0 ? args.mesh_edge : extent / 40.0;
  const double ext =
      args.mesh_extension >= 0.0 ? args.mesh_extension : default_extension(data.sites);
  const Mesh mesh = build_mesh(data.sites, edge, ext);
  const Projector proj = project(mesh, data.sites);
  const PrecisionOperator op = make_precision_operator(mesh);

  ModelConfig cfg = args.model;
  cfg.spatial_scale = parse_scale(args.spatial_scale);
  cfg.adapt_mh = !args.no_adapt;
  cfg.store_w = true;

  ChainLog chain_log;
  const auto progress = [](long it, long total) {
    std::cerr << "sweep " << it << "/" << total << "\n";
  };
  const PosteriorDraws draws = run_chain(data, cfg, mesh, proj, op, progress, &chain_log);
  std::cerr << "acceptance: r " << chain_log.accept_rate_r << ", rho " << chain_log.accept_rate_rho
            << "; scale clamps " << chain_log.scale_clamps << ", rejected factorizations "
            << chain_log.rejected_factorizations << "\n";

  ensure_out_dir(args.common.out_dir);
  const std::string draws_path = args.common.out_dir + "/draws.csv";
  {
    auto out = open_out(draws_path);
    draws.to_csv(out);
  }
  const std::string trace_path = args.common.out_dir + "/trace_summary.csv";
  {
    auto out = open_out(trace_path);
    write_trace_summary(trace_summary(draws), out);
  }
  const std::string w_path = args.common.out_dir + "/w_mean.csv";
  {
    auto out = open_out(w_path);
    out << "node,w_mean\n";
    out.precision(17);
    const Eigen::VectorXd w_mean = draws.w_draws.colwise().mean();
    for (Eigen::Index i = 0; i < w_mean.size(); ++i) out << i << "," << w_mean[i] << "\n";
  }
  const std::string mesh_path = args.common.out_dir + "/mesh.txt";
  save_mesh(mesh, mesh_path);
  const std::string std_path = args.common.out_dir + "/standardize.csv";
  {
    auto out = open_out(std_path);
    out << "column,name,mean,sd\n";
    out.precision(17);
    for (Eigen::Index j = 0; j < data.p(); ++j)
      out << j << "," << data.covariate_names[static_cast<size_t>(j)] << "," << st.means[j] << ","
          << st.sds[j] << "\n";
  }
  const std::string meta_path = args.common.out_dir + "/chain_meta.json";
  {
    auto out = open_out(meta_path);
    out << "{\n  \"seed\": " << cfg.seed << ",\n  \"iterations\": " << cfg.iterations
        << ",\n  \"burn_in\": " << cfg.burn_in << ",\n  \"thinning\": " << cfg.thinning
        << ",\n  \"spatial_scale\": \"" << args.spatial_scale << "\",\n  \"transform\": \""
        << args.transform << "\"\n}\n";
  }

  manifest.outputs = {draws_path, trace_path, w_path, mesh_path, std_path, meta_path};
  manifest.notes["censored_pct"] = std::to_string(load_report.censored_pct);
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  return 0;
}

// -------------------------------------------------------------- select ----

struct SelectArgs {
  std::string draws_path;
  std::string method = "all";
  double cr_level = 0.95;
  double hsp_cutoff = 0.5;
  double s2m_b = 1.0;
  bool exempt_intercept = false;
  CommonOpts common;
};

int cmd_select(const SelectArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "select";
  manifest.config_digest = cfg_digest;
  manifest.started = iso_timestamp();
  manifest.inputs[args.draws_path] = digest_file(args.draws_path);

  std::ifstream in(args.draws_path);
  if (!in) throw data_error("cannot open " + args.draws_path);
  const PosteriorDraws draws = PosteriorDraws::from_csv(in);

  std::vector<std::string> methods;
  if (args.method == "all")
    methods = {"cr", "s2m", "hsp"};
  else if (args.method == "cr" || args.method == "s2m" || args.method == "hsp")
    methods = {args.method};
  else
    throw config_error("method must be one of cr, hsp, s2m, all");

  ensure_out_dir(args.common.out_dir);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < draws.p; ++j) names.push_back("beta_" + std::to_string(j + 1));

  for (const auto& m : methods) {
    SelectionResult result;
    if (m == "cr")
      result = select_cr(draws, args.cr_level, args.exempt_intercept);
    else if (m == "hsp")
      result = select_hsp(draws, args.hsp_cutoff, args.exempt_intercept);
    else
      result = select_s2m(draws, args.s2m_b, args.exempt_intercept);
    const std::string path = args.common.out_dir + "/selection_" + m + ".csv";
    auto out = open_out(path);
    selection_to_csv(result, names, out);
    manifest.outputs.push_back(path);
    std::cout << "method=" << m << " selected=" << result.selected_count() << " of " << draws.p
              << "\n";
  }
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  return 0;
}

// ------------------------------------------------------------- predict ----

struct PredictArgs {
  std::string fit_dir;
  std::string data_path;
  std::string sites_path;
  std::string mask_path;  // selection csv; empty -> all included
  DatasetSchema schema;
  std::string transform = "iterated-log";
  std::string spatial_scale = "sqrt_r";
  CommonOpts common;
};

int cmd_predict(const PredictArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "predict";
  manifest.config_digest = cfg_digest;
  manifest.started = iso_timestamp();

  const std::string draws_path = args.fit_dir + "/draws.csv";
  const std::string w_path = args.fit_dir + "/w_mean.csv";
  const std::string mesh_path = args.fit_dir + "/mesh.txt";
  const std::string std_path = args.fit_dir + "/standardize.csv";
  for (const auto& p : {draws_path, w_path, mesh_path, std_path, args.data_path})
    manifest.inputs[p] = digest_file(p);

  std::ifstream din(draws_path);
  if (!din) throw data_error("cannot open " + draws_path);
  const PosteriorDraws draws = PosteriorDraws::from_csv(din);

  const Mesh mesh = load_mesh(mesh_path);
  Eigen::VectorXd w_mean(mesh.num_nodes());
  {
    const CsvTable t = read_csv_file(w_path);
    if (static_cast<Eigen::Index>(t.n_rows()) != mesh.num_nodes())
      throw data_error("w_mean.csv does not match the mesh size");
    const int cv = t.col("w_mean");
    if (cv < 0) throw data_error("w_mean.csv lacks a w_mean column");
    for (size_t i = 0; i < t.n_rows(); ++i)
      w_mean[static_cast<Eigen::Index>(i)] =
          parse_numeric_cell(t.rows[i][static_cast<size_t>(cv)], i + 2, "w_mean");
  }

  Standardization st;
  std::vector<std::string> fit_names;
  {
    const CsvTable t = read_csv_file(std_path);
    const int cm = t.col("mean"), cs = t.col("sd"), cn = t.col("name");
    if (cm < 0 || cs < 0 || cn < 0) throw data_error("standardize.csv is malformed");
    st.means.resize(static_cast<Eigen::Index>(t.n_rows()));
    st.sds.resize(static_cast<Eigen::Index>(t.n_rows()));
    for (size_t i = 0; i < t.n_rows(); ++i) {
      st.means[static_cast<Eigen::Index>(i)] =
          parse_numeric_cell(t.rows[i][static_cast<size_t>(cm)], i + 2, "mean");
      st.sds[static_cast<Eigen::Index>(i)] =
          parse_numeric_cell(t.rows[i][static_cast<size_t>(cs)], i + 2, "sd");
      fit_names.push_back(t.rows[i][static_cast<size_t>(cn)]);
    }
  }
  if (static_cast<Eigen::Index>(fit_names.size()) != draws.p)
    throw data_error("standardize.csv does not match the draws");

  DatasetSchema schema = args.schema;
  schema.covariates.assign(fit_names.begin() + 1, fit_names.end());  // first entry is the intercept
  SpatialDataset new_data = load_dataset(args.sites_path, args.data_path, schema);
  if (args.transform == "iterated-log")
    apply_response_transform(new_data);
  else if (args.transform != "none")
    throw config_error("transform must be iterated-log or none");
  new_data.X = apply_standardization(new_data.X, st, true);

  std::vector<std::uint8_t> mask(static_cast<size_t>(draws.p), 1);
  if (!args.mask_path.empty()) {
    manifest.inputs[args.mask_path] = digest_file(args.mask_path);
    const CsvTable t = read_csv_file(args.mask_path);
    const int ci = t.col("included");
    if (ci < 0 || static_cast<Eigen::Index>(t.n_rows()) != draws.p)
      throw data_error("mask file must be a selection csv matching the fitted p");
    for (size_t i = 0; i < t.n_rows(); ++i)
      mask[i] = t.rows[i][static_cast<size_t>(ci)] == "1" ? 1 : 0;
  }

  const Projector new_proj = project(mesh, new_data.sites);
  const Eigen::VectorXd pred = predict_with_summary(draws, w_mean, new_data.X, new_proj.A, mask,
                                                    parse_scale(args.spatial_scale));

  ensure_out_dir(args.common.out_dir);
  const std::string pred_path = args.common.out_dir + "/predictions.csv";
  {
    auto out = open_out(pred_path);
    out << "x,y,prediction\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < pred.size(); ++i)
      out << new_data.sites(i, 0) << "," << new_data.sites(i, 1) << "," << pred[i] << "\n";
  }
  manifest.outputs.push_back(pred_path);
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  std::cerr << "predicted " << pred.size() << " sites\n";
  return 0;
}

// ------------------------------------------------------------ simulate ----

struct SimulateArgs {
  int grid_side = 40;
  int p = 50;
  std::vector<double> censor_pcts = {20.0};
  std::vector<double> rhos = {0.07, 0.12, 0.20};
  std::vector<double> snrs = {0.91};
  std::vector<double> zero_pcts = {95.0};
  int n_reps = 10;
  double train_frac = 0.8;
  double signal_lo = 0.5, signal_hi = 2.0;
  bool use_spde_generator = false;
  double mesh_edge = 0.025;
  double mesh_extension = -1.0;
  std::string rmse_mode = "mean";
  std::string spatial_scale = "sqrt_r";
  bool refit = false;
  double cr_level = 0.95;
  double hsp_cutoff = 0.5;
  double s2m_b = 1.0;
  ModelConfig model;
  bool no_adapt = false;
  CommonOpts common;
};

int cmd_simulate(const SimulateArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_digest = cfg_digest;
  manifest.seed = args.common.seed;
  manifest.started = iso_timestamp();

  std::vector<ScenarioSpec> grid;
  for (const double zero : args.zero_pcts)
    for (const double rho : args.rhos)
      for (const double snr : args.snrs)
        for (const double cens : args.censor_pcts) {
          ScenarioSpec spec;
          spec.grid_side = args.grid_side;
          spec.p = args.p;
          spec.censor_pct = cens;
          spec.rho = rho;
          spec.snr_r = snr;
          spec.zero_pct = zero;
          spec.n_reps = args.n_reps;
          spec.train_frac = args.train_frac;
          spec.seed = args.common.seed;
          spec.signal_lo = args.signal_lo;
          spec.signal_hi = args.signal_hi;
          spec.use_spde_generator = args.use_spde_generator;
          grid.push_back(spec);
        }

  ModelConfig cfg = args.model;
  cfg.spatial_scale = parse_scale(args.spatial_scale);
  cfg.adapt_mh = !args.no_adapt;

  SimOptions options;
  options.mesh_edge = args.mesh_edge;
  options.mesh_extension = args.mesh_extension;
  options.rmse_mode = parse_rmse_mode(args.rmse_mode);
  options.refit = args.refit;
  options.threads = args.common.threads;
  options.cr_level = args.cr_level;
  options.hsp_cutoff = args.hsp_cutoff;
  options.s2m_b = args.s2m_b;

  const SimulationReport report = run_scenarios(grid, cfg, options);

  ensure_out_dir(args.common.out_dir);
  write_report_tables(report, args.common.out_dir);
  const std::string raw_path = args.common.out_dir + "/raw_results.csv";
  {
    auto out = open_out(raw_path);
    write_raw_results(report, out);
  }
  int failed = 0;
  for (const auto& res : report.results) failed += res.ok ? 0 : 1;
  if (failed > 0) std::cerr << "warning: " << failed << " replicates failed and were excluded\n";
  for (const auto& entry : fs::directory_iterator(args.common.out_dir))
    if (entry.path().extension() == ".csv") manifest.outputs.push_back(entry.path().string());
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  manifest.notes["replicates_failed"] = std::to_string(failed);
  manifest.notes["single_rep"] = args.n_reps == 1 ? "true" : "false";
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  return 0;
}

// -------------------------------------------------------------- report ----

struct ReportArgs {
  std::string raw_path;
  CommonOpts common;
};

int cmd_report(const ReportArgs& args, const std::string& cfg_digest) {
  RunManifest manifest;
  manifest.command = "report";
  manifest.config_digest = cfg_digest;
  manifest.started = iso_timestamp();
  manifest.inputs[args.raw_path] = digest_file(args.raw_path);

  std::ifstream in(args.raw_path);
  if (!in) throw data_error("cannot open " + args.raw_path);
  const SimulationReport report = read_raw_results(in);
  ensure_out_dir(args.common.out_dir);
  write_report_tables(report, args.common.out_dir);
  for (const auto& entry : fs::directory_iterator(args.common.out_dir))
    if (entry.path().extension() == ".csv") manifest.outputs.push_back(entry.path().string());
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  manifest.finished = iso_timestamp();
  write_manifest(manifest, args.common.out_dir);
  return 0;
}

void add_common(CLI::App* app, CommonOpts& common) {
  app->add_option("--out", common.out_dir, "Output directory");
  app->add_option("--seed", common.seed, "Random seed");
  app->add_option("--threads", common.threads, "Worker threads (0 = hardware)");
}

void add_model(CLI::App* app, ModelConfig& model) {
  app->add_option("--iterations", model.iterations, "MCMC sweeps");
  app->add_option("--burn-in", model.burn_in, "Stored draws discarded as burn-in");
  app->add_option("--thinning", model.thinning, "Keep every k-th sweep");
  app->add_option("--a-sigma", model.a_sigma, "Inverse-gamma shape for sigma2");
  app->add_option("--b-sigma", model.b_sigma, "Inverse-gamma rate for sigma2");
  app->add_option("--rho-max", model.rho_max, "Upper range bound (0 = half max distance)");
  app->add_option("--mh-step-r", model.mh_step_r, "Logit-scale step for r");
  app->add_option("--mh-step-rho", model.mh_step_rho, "Log-scale step for rho");
}

void add_schema(CLI::App* app, DatasetSchema& schema) {
  app->add_option("--col-site-id", schema.site_id, "Site id column");
  app->add_option("--col-x", schema.x, "X coordinate column");
  app->add_option("--col-y", schema.y, "Y coordinate column");
  app->add_option("--col-response", schema.response, "Response column");
  app->add_option("--col-censored", schema.censored, "Censoring flag column");
  app->add_option("--col-limit", schema.limit, "Detection limit column");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Censored spatial regression with shrinkage-based variable selection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags win");

  MeshArgs mesh_args;
  auto* mesh_cmd = app.add_subcommand("mesh", "Build and export a triangulated mesh");
  mesh_cmd->add_option("--sites", mesh_args.sites_path, "CSV with x,y columns")->required();
  mesh_cmd->add_option("--edge", mesh_args.edge, "Target edge length (0 = extent/40)");
  mesh_cmd->add_option("--extension", mesh_args.extension, "Boundary extension (< 0 = default)");
  add_common(mesh_cmd, mesh_args.common);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the censored spatial regression model");
  fit_cmd->add_option("--data", fit_args.data_path, "Dataset CSV")->required();
  fit_cmd->add_option("--sites", fit_args.sites_path, "Separate sites CSV (joined on site_id)");
  add_schema(fit_cmd, fit_args.schema);
  fit_cmd->add_option("--transform", fit_args.transform, "Response transform: iterated-log|none");
  fit_cmd->add_flag("--no-standardize", fit_args.no_standardize, "Skip covariate standardization");
  fit_cmd->add_option("--mesh-edge", fit_args.mesh_edge, "Mesh edge (0 = extent/40)");
  fit_cmd->add_option("--mesh-extension", fit_args.mesh_extension,
                      "Mesh extension (< 0 = default)");
  fit_cmd->add_option("--spatial-scale", fit_args.spatial_scale, "sqrt_r|r");
  fit_cmd->add_flag("--no-adapt", fit_args.no_adapt, "Disable burn-in step-size adaptation");
  add_model(fit_cmd, fit_args.model);
  add_common(fit_cmd, fit_args.common);

  SelectArgs select_args;
  auto* select_cmd = app.add_subcommand("select", "Variable selection from stored draws");
  select_cmd->add_option("--draws", select_args.draws_path, "draws.csv from fit")->required();
  select_cmd->add_option("--method", select_args.method, "cr|hsp|s2m|all");
  select_cmd->add_option("--cr-level", select_args.cr_level, "Credible level for Cr");
  select_cmd->add_option("--hsp-cutoff", select_args.hsp_cutoff, "Shrinkage-weight cutoff");
  select_cmd->add_option("--s2m-b", select_args.s2m_b, "Two-means assignment bias");
  select_cmd->add_flag("--exempt-intercept", select_args.exempt_intercept,
                       "Always include the intercept");
  add_common(select_cmd, select_args.common);

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict at new sites from a fit directory");
  predict_cmd->add_option("--fit", predict_args.fit_dir, "Directory produced by fit")->required();
  predict_cmd->add_option("--data", predict_args.data_path, "New-site CSV")->required();
  predict_cmd->add_option("--sites", predict_args.sites_path, "Separate sites CSV");
  add_schema(predict_cmd, predict_args.schema);
  predict_cmd->add_option("--mask", predict_args.mask_path,
                          "Selection CSV restricting coefficients");
  predict_cmd->add_option("--transform", predict_args.transform, "iterated-log|none");
  predict_cmd->add_option("--spatial-scale", predict_args.spatial_scale, "sqrt_r|r");
  add_common(predict_cmd, predict_args.common);

  SimulateArgs sim_args;
  sim_args.model.iterations = 20000;  // desk-scale chain defaults
  sim_args.model.burn_in = 500;
  sim_args.model.thinning = 10;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the synthetic benchmark grid");
  sim_cmd->add_option("--grid-side", sim_args.grid_side, "Lattice side length");
  sim_cmd->add_option("--p", sim_args.p, "Number of covariates");
  sim_cmd->add_option("--censor-pcts", sim_args.censor_pcts, "Censoring levels (percent)");
  sim_cmd->add_option("--rhos", sim_args.rhos, "Range parameters");
  sim_cmd->add_option("--snrs", sim_args.snrs, "Partial sill to sill ratios");
  sim_cmd->add_option("--zero-pcts", sim_args.zero_pcts, "Percent of zero coefficients");
  sim_cmd->add_option("--n-reps", sim_args.n_reps, "Replicates per scenario");
  sim_cmd->add_option("--train-frac", sim_args.train_frac, "Training fraction");
  sim_cmd->add_option("--signal-lo", sim_args.signal_lo, "Smallest |beta| signal");
  sim_cmd->add_option("--signal-hi", sim_args.signal_hi, "Largest |beta| signal");
  sim_cmd->add_flag("--spde-generator", sim_args.use_spde_generator,
                    "Generate fields through the mesh instead of the dense kernel");
  sim_cmd->add_option("--mesh-edge", sim_args.mesh_edge, "Fitting mesh edge");
  sim_cmd->add_option("--mesh-extension", sim_args.mesh_extension,
                      "Mesh extension (< 0 = default)");
  sim_cmd->add_option("--rmse-mode", sim_args.rmse_mode, "mean|sum");
  sim_cmd->add_option("--spatial-scale", sim_args.spatial_scale, "sqrt_r|r");
  sim_cmd->add_flag("--refit", sim_args.refit, "Refit on the selected subset before predicting");
  sim_cmd->add_option("--cr-level", sim_args.cr_level, "Credible level for Cr");
  sim_cmd->add_option("--hsp-cutoff", sim_args.hsp_cutoff, "Shrinkage-weight cutoff");
  sim_cmd->add_option("--s2m-b", sim_args.s2m_b, "Two-means assignment bias");
  sim_cmd->add_flag("--no-adapt", sim_args.no_adapt, "Disable burn-in step-size adaptation");
  add_model(sim_cmd, sim_args.model);
  add_common(sim_cmd, sim_args.common);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate tables from raw results");
  report_cmd->add_option("--raw", report_args.raw_path, "raw_results.csv")->required();
  add_common(report_cmd, report_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string digest = config_digest_of(app);
    if (mesh_cmd->parsed()) return cmd_mesh(mesh_args, digest);
    if (fit_cmd->parsed()) {
      fit_args.model.seed = fit_args.common.seed;
      return cmd_fit(fit_args, digest);
    }
    if (select_cmd->parsed()) return cmd_select(select_args, digest);
    if (predict_cmd->parsed()) return cmd_predict(predict_args, digest);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args, digest);
    if (report_cmd->parsed()) return cmd_report(report_args, digest);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
