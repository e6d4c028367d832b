#include "spatsel/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "spatsel/errors.hpp"
#include "spatsel/gmrf.hpp"
#include "spatsel/matern.hpp"
#include "spatsel/sampler.hpp"
#include "spatsel/stats.hpp"

namespace spatsel {

const SelectionMethod kMethodOrder[kNumMethods] = {SelectionMethod::cr, SelectionMethod::s2m,
                                                   SelectionMethod::hsp};

void ScenarioSpec::validate() const {
  if (grid_side < 2 || p < 1 || n_reps < 1) throw config_error("scenario: bad sizes");
  if (!(censor_pct > 0.0 && censor_pct < 100.0))
    throw config_error("scenario: censor_pct outside (0,100)");
  if (!(zero_pct >= 0.0 && zero_pct <= 100.0))
    throw config_error("scenario: zero_pct outside [0,100]");
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw config_error("scenario: train_frac outside (0,1)");
  if (!(rho > 0.0) || !(snr_r > 0.0 && snr_r < 1.0))
    throw config_error("scenario: rho must be > 0 and snr_r in (0,1)");
  if (!(signal_hi >= signal_lo && signal_lo > 0.0)) throw config_error("scenario: bad signal range");
}

GeneratedData gen_scenario_data(const ScenarioSpec& spec, int rep_index, Rng& rng) {
  spec.validate();
  (void)rep_index;
  const int g = spec.grid_side;
  const Eigen::Index n = static_cast<Eigen::Index>(g) * g;
  const Eigen::Index p = spec.p;

  GeneratedData out;
  out.data.sites.resize(n, 2);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < g; ++i) {
      const Eigen::Index k = static_cast<Eigen::Index>(j) * g + i;
      out.data.sites(k, 0) = static_cast<double>(i) / (g - 1);
      out.data.sites(k, 1) = static_cast<double>(j) / (g - 1);
    }

  std::normal_distribution<double> N(0.0, 1.0);
  out.data.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) out.data.X(i, j) = N(rng);

  // true coefficients: ceil(p * zero_pct / 100) zeros at random positions,
  // the rest +-U[signal_lo, signal_hi]
  const Eigen::Index n_zero =
      std::min<Eigen::Index>(p, static_cast<Eigen::Index>(std::ceil(p * spec.zero_pct / 100.0)));
  std::vector<Eigen::Index> idx(static_cast<size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  out.true_beta = Eigen::VectorXd::Zero(p);
  std::uniform_real_distribution<double> mag(spec.signal_lo, spec.signal_hi);
  for (Eigen::Index k = n_zero; k < p; ++k) {
    const double sign = draw_uniform(rng) < 0.5 ? -1.0 : 1.0;
    out.true_beta[idx[static_cast<size_t>(k)]] = sign * mag(rng);
  }

  // latent z with unit total variance: snr_r * Matern + (1 - snr_r) * I
  Eigen::VectorXd z(n);
  if (spec.use_spde_generator) {
    const Mesh mesh = build_mesh(out.data.sites, std::min(0.025, spec.rho / 5.0),
                                 default_extension(out.data.sites));
    const PrecisionOperator op = make_precision_operator(mesh);
    const SparseFactor factor(build_precision(op, spec.rho));
    const Projector proj = project(mesh, out.data.sites);
    const Eigen::VectorXd w = factor.sample(rng);
    const double a = std::sqrt(spec.snr_r), b = std::sqrt(1.0 - spec.snr_r);
    z = a * (proj.A * w);
    for (Eigen::Index i = 0; i < n; ++i) z[i] += b * N(rng);
  } else {
    if (n > 4000)
      throw config_error(
          "gen_scenario_data: grid too large for the dense generator; "
          "set use_spde_generator");
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      cov(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = (out.data.sites.row(i) - out.data.sites.row(j)).norm();
        const double c = spec.snr_r * matern_correlation(d, spec.rho, 1.0, false);
        cov(i, j) = cov(j, i) = c;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw numeric_error("gen_scenario_data: exact covariance not positive definite");
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps[i] = N(rng);
    z = llt.matrixL() * eps;
  }

  out.true_y = out.data.X * out.true_beta + z;  // sigma^2 = 1
  out.data.y = out.true_y;
  out.data.censored.assign(static_cast<size_t>(n), 0);
  out.data.limits = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  out.data.covariate_names.clear();
  for (Eigen::Index j = 0; j < p; ++j)
    out.data.covariate_names.push_back("x" + std::to_string(j + 1));
  return out;
}

CensoringResult apply_censoring(const Eigen::Ref<const Eigen::VectorXd>& y, double censor_pct) {
  if (y.size() < 1) throw data_error("apply_censoring: empty response");
  CensoringResult out;
  out.limit = quantile_type7(y, censor_pct / 100.0);
  out.limits = Eigen::VectorXd::Constant(y.size(), out.limit);
  out.flags.assign(static_cast<size_t>(y.size()), 0);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out.flags[static_cast<size_t>(i)] = y[i] <= out.limit ? 1 : 0;
  return out;
}

TrainTestSplit split_train_test(const SpatialDataset& data,
                                const Eigen::Ref<const Eigen::VectorXd>& true_y, double train_frac,
                                Rng& rng) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw data_error("split_train_test: train_frac outside (0,1)");
  const Eigen::Index n = data.n();
  std::vector<Eigen::Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::Index n_train = static_cast<Eigen::Index>(std::llround(train_frac * n));
  n_train = std::clamp<Eigen::Index>(n_train, 1, n - 1);

  TrainTestSplit out;
  out.train_idx.assign(perm.begin(), perm.begin() + n_train);
  out.test_idx.assign(perm.begin() + n_train, perm.end());
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());

  const Eigen::Index nt = static_cast<Eigen::Index>(out.test_idx.size());
  out.train.X.resize(n_train, data.p());
  out.train.sites.resize(n_train, 2);
  out.train.y.resize(n_train);
  out.train.limits.resize(n_train);
  out.train.censored.assign(static_cast<size_t>(n_train), 0);
  out.train.covariate_names = data.covariate_names;
  out.train.has_intercept = data.has_intercept;
  for (Eigen::Index k = 0; k < n_train; ++k) {
    const Eigen::Index i = out.train_idx[static_cast<size_t>(k)];
    out.train.X.row(k) = data.X.row(i);
    out.train.sites.row(k) = data.sites.row(i);
    out.train.y[k] = data.y[i];
    out.train.limits[k] = data.limits[i];
    out.train.censored[static_cast<size_t>(k)] = data.censored[static_cast<size_t>(i)];
  }
  out.test_sites.resize(nt, 2);
  out.test_x.resize(nt, data.p());
  out.test_true_y.resize(nt);
  for (Eigen::Index k = 0; k < nt; ++k) {
    const Eigen::Index i = out.test_idx[static_cast<size_t>(k)];
    out.test_sites.row(k) = data.sites.row(i);
    out.test_x.row(k) = data.X.row(i);
    out.test_true_y[k] = true_y[i];
  }
  return out;
}

double prediction_rmse(const Eigen::Ref<const Eigen::VectorXd>& truth,
                       const Eigen::Ref<const Eigen::VectorXd>& pred, RmseMode mode) {
  if (truth.size() != pred.size() || truth.size() < 1)
    throw data_error("prediction_rmse: length mismatch");
  const double ss = (truth - pred).squaredNorm();
  return mode == RmseMode::mean ? std::sqrt(ss / static_cast<double>(truth.size()))
                                : std::sqrt(ss);
}

double mismatch_pct(const std::vector<std::uint8_t>& true_mask,
                    const std::vector<std::uint8_t>& selected_mask) {
  if (true_mask.size() != selected_mask.size() || true_mask.empty())
    throw data_error("mismatch_pct: length mismatch");
  Eigen::Index ham = 0;
  for (size_t j = 0; j < true_mask.size(); ++j)
    ham += ((true_mask[j] != 0) != (selected_mask[j] != 0));
  return 100.0 * static_cast<double>(ham) / static_cast<double>(true_mask.size());
}

ReplicateResult run_replicate(const ScenarioSpec& spec, int scenario_index, int rep,
                              const ModelConfig& cfg, const SimOptions& options) {
  ReplicateResult out;
  out.scenario = scenario_index;
  out.rep = rep;
  try {
    Rng rng = derive_rng(spec.seed, static_cast<std::uint64_t>(scenario_index),
                         static_cast<std::uint64_t>(rep));
    GeneratedData gen = gen_scenario_data(spec, rep, rng);
    const CensoringResult cens = apply_censoring(gen.data.y, spec.censor_pct);
    gen.data.censored = cens.flags;
    gen.data.limits = cens.limits;
    TrainTestSplit split = split_train_test(gen.data, gen.true_y, spec.train_frac, rng);

    const double ext = options.mesh_extension >= 0.0 ? options.mesh_extension
                                                     : default_extension(split.train.sites);
    const Mesh mesh = build_mesh(split.train.sites, options.mesh_edge, ext);
    const Projector proj = project(mesh, split.train.sites);
    const PrecisionOperator op = make_precision_operator(mesh);

    ModelConfig chain_cfg = cfg;
    chain_cfg.seed = mix64(spec.seed ^ mix64((static_cast<std::uint64_t>(scenario_index) << 20) +
                                             static_cast<std::uint64_t>(rep)));
    chain_cfg.store_w = true;
    const PosteriorDraws draws = run_chain(split.train, chain_cfg, mesh, proj, op);

    std::vector<std::uint8_t> true_mask(static_cast<size_t>(spec.p), 0);
    for (Eigen::Index j = 0; j < gen.true_beta.size(); ++j)
      true_mask[static_cast<size_t>(j)] = gen.true_beta[j] != 0.0 ? 1 : 0;

    const Projector test_proj = project(mesh, split.test_sites);
    for (int mi = 0; mi < kNumMethods; ++mi) {
      SelectionResult sel;
      switch (kMethodOrder[mi]) {
        case SelectionMethod::cr: sel = select_cr(draws, options.cr_level, false); break;
        case SelectionMethod::s2m: sel = select_s2m(draws, options.s2m_b, false); break;
        case SelectionMethod::hsp: sel = select_hsp(draws, options.hsp_cutoff, false); break;
      }
      out.selected[mi] = static_cast<int>(sel.selected_count());
      out.mismatch[mi] = mismatch_pct(true_mask, sel.mask);

      Eigen::VectorXd pred;
      if (options.refit && sel.selected_count() > 0) {
        SpatialDataset sub = split.train;
        const Eigen::Index k = sel.selected_count();
        sub.X.resize(split.train.n(), k);
        sub.covariate_names.clear();
        Eigen::MatrixXd test_x_sub(split.test_x.rows(), k);
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < spec.p; ++j)
          if (sel.mask[static_cast<size_t>(j)]) {
            sub.X.col(c) = split.train.X.col(j);
            test_x_sub.col(c) = split.test_x.col(j);
            sub.covariate_names.push_back(split.train.covariate_names[static_cast<size_t>(j)]);
            ++c;
          }
        ModelConfig refit_cfg = chain_cfg;
        refit_cfg.seed = mix64(chain_cfg.seed + 1000003ULL * (mi + 1));
        const PosteriorDraws redraws = run_chain(sub, refit_cfg, mesh, proj, op);
        pred = predict(redraws, test_x_sub, test_proj.A,
                       std::vector<std::uint8_t>(static_cast<size_t>(k), 1), cfg.spatial_scale);
      } else {
        pred = predict(draws, split.test_x, test_proj.A, sel.mask, cfg.spatial_scale);
      }
      out.rmse[mi] = prediction_rmse(split.test_true_y, pred, options.rmse_mode);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

SimulationReport run_scenarios(const std::vector<ScenarioSpec>& grid, const ModelConfig& cfg,
                               const SimOptions& options) {
  if (grid.empty()) throw config_error("run_scenarios: empty scenario grid");
  for (const auto& s : grid) s.validate();

  SimulationReport report;
  report.scenarios = grid;
  std::vector<std::pair<int, int>> tasks;
  for (int s = 0; s < static_cast<int>(grid.size()); ++s)
    for (int r = 0; r < grid[static_cast<size_t>(s)].n_reps; ++r) tasks.emplace_back(s, r);
  report.results.resize(tasks.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads =
      options.threads > 0 ? static_cast<unsigned>(options.threads) : hw;
  std::atomic<size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&]() {
    for (;;) {
      const size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto [s, r] = tasks[t];
      report.results[t] = run_replicate(grid[static_cast<size_t>(s)], s, r, cfg, options);
      if (!report.results[t].ok) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "warning: scenario " << s << " replicate " << r
                  << " failed: " << report.results[t].error << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

ScenarioAggregate SimulationReport::aggregate(int scenario_index) const {
  ScenarioAggregate agg{};
  std::vector<double> rmse[kNumMethods], mism[kNumMethods];
  for (const auto& res : results) {
    if (res.scenario != scenario_index) continue;
    if (!res.ok) {
      ++agg.n_failed;
      continue;
    }
    ++agg.n_ok;
    for (int m = 0; m < kNumMethods; ++m) {
      rmse[m].push_back(res.rmse[m]);
      mism[m].push_back(res.mismatch[m]);
    }
  }
  for (int m = 0; m < kNumMethods; ++m) {
    const auto stats = [](const std::vector<double>& v) -> std::pair<double, double> {
      if (v.empty()) return {0.0, 0.0};
      const Eigen::Map<const Eigen::VectorXd> mv(v.data(), static_cast<Eigen::Index>(v.size()));
      return {sample_mean(mv), sample_sd(mv)};
    };
    std::tie(agg.mean_rmse[m], agg.sd_rmse[m]) = stats(rmse[m]);
    std::tie(agg.mean_mismatch[m], agg.sd_mismatch[m]) = stats(mism[m]);
  }
  return agg;
}

namespace {

std::string fmt_cell(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", mean, sd);
  return buf;
}

std::string trim_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void write_report_tables(const SimulationReport& report, const std::string& out_dir) {
  std::set<double> censor_levels, snrs_set;
  for (const auto& s : report.scenarios) {
    censor_levels.insert(s.censor_pct);
    snrs_set.insert(s.snr_r);
  }
  std::vector<double> snrs(snrs_set.rbegin(), snrs_set.rend());  // descending, e.g. 0.91 then 0.80

  for (const double cl : censor_levels) {
    // rows: zero_pct descending then rho ascending, matching the table layout
    std::vector<int> rows;
    for (int s = 0; s < static_cast<int>(report.scenarios.size()); ++s)
      if (report.scenarios[static_cast<size_t>(s)].censor_pct == cl &&
          report.scenarios[static_cast<size_t>(s)].snr_r == snrs.front())
        rows.push_back(s);
    std::sort(rows.begin(), rows.end(), [&](int a, int b) {
      const auto& sa = report.scenarios[static_cast<size_t>(a)];
      const auto& sb = report.scenarios[static_cast<size_t>(b)];
      if (sa.zero_pct != sb.zero_pct) return sa.zero_pct > sb.zero_pct;
      return sa.rho < sb.rho;
    });

    for (const bool is_rmse : {true, false}) {
      std::ostringstream name;
      name << out_dir << "/table_" << (is_rmse ? "rmse" : "mismatch") << "_cens" << trim_num(cl)
           << ".csv";
      std::ofstream out(name.str());
      if (!out) throw data_error("write_report_tables: cannot open " + name.str());
      out << "zeros_pct,rho";
      for (const double snr : snrs)
        for (int m = 0; m < kNumMethods; ++m)
          out << "," << selection_method_name(kMethodOrder[m]) << "_snr" << trim_num(snr);
      out << "\n";
      for (const int srow : rows) {
        const auto& base = report.scenarios[static_cast<size_t>(srow)];
        out << trim_num(base.zero_pct) << "," << trim_num(base.rho);
        for (const double snr : snrs) {
          int match = -1;
          for (int s = 0; s < static_cast<int>(report.scenarios.size()); ++s) {
            const auto& sc = report.scenarios[static_cast<size_t>(s)];
            if (sc.censor_pct == cl && sc.snr_r == snr && sc.zero_pct == base.zero_pct &&
                sc.rho == base.rho) {
              match = s;
              break;
            }
          }
          if (match < 0) {
            for (int m = 0; m < kNumMethods; ++m) out << ",";
            continue;
          }
          const ScenarioAggregate agg = report.aggregate(match);
          for (int m = 0; m < kNumMethods; ++m)
            out << ","
                << (is_rmse ? fmt_cell(agg.mean_rmse[m], agg.sd_rmse[m])
                            : fmt_cell(agg.mean_mismatch[m], agg.sd_mismatch[m]));
        }
        out << "\n";
      }
    }
  }
}

void write_raw_results(const SimulationReport& report, std::ostream& out) {
  out << "scenario,grid_side,p,censor_pct,rho,snr,zero_pct,rep,ok,method,selected,rmse,mismatch,"
         "error\n";
  char buf[64];
  for (const auto& res : report.results) {
    const auto& sc = report.scenarios[static_cast<size_t>(res.scenario)];
    for (int m = 0; m < kNumMethods; ++m) {
      out << res.scenario << "," << sc.grid_side << "," << sc.p << "," << trim_num(sc.censor_pct)
          << "," << trim_num(sc.rho) << "," << trim_num(sc.snr_r) << "," << trim_num(sc.zero_pct)
          << "," << res.rep << "," << (res.ok ? 1 : 0) << ","
          << selection_method_name(kMethodOrder[m]) << "," << res.selected[m] << ",";
      std::snprintf(buf, sizeof buf, "%.17g", res.rmse[m]);
      out << buf << ",";
      std::snprintf(buf, sizeof buf, "%.17g", res.mismatch[m]);
      out << buf << ",";
      std::string err = res.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << err << "\n";
      if (!res.ok) break;  // one error row is enough
    }
  }
}

SimulationReport read_raw_results(std::istream& in) {
  SimulationReport report;
  std::string line;
  if (!std::getline(in, line)) throw data_error("raw results: empty file");
  std::map<int, ScenarioSpec> scen;
  std::map<std::pair<int, int>, ReplicateResult> reps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 13) throw data_error("raw results: short row");
    ScenarioSpec sc;
    const int s = std::stoi(cells[0]);
    sc.grid_side = std::stoi(cells[1]);
    sc.p = std::stoi(cells[2]);
    sc.censor_pct = std::stod(cells[3]);
    sc.rho = std::stod(cells[4]);
    sc.snr_r = std::stod(cells[5]);
    sc.zero_pct = std::stod(cells[6]);
    scen[s] = sc;
    const int rep = std::stoi(cells[7]);
    auto& res = reps[{s, rep}];
    res.scenario = s;
    res.rep = rep;
    res.ok = cells[8] == "1";
    const std::string& method = cells[9];
    for (int m = 0; m < kNumMethods; ++m)
      if (method == selection_method_name(kMethodOrder[m])) {
        res.selected[m] = std::stoi(cells[10]);
        res.rmse[m] = std::stod(cells[11]);
        res.mismatch[m] = std::stod(cells[12]);
      }
    if (cells.size() > 13) res.error = cells[13];
  }
  int max_s = -1;
  for (const auto& [s, sc] : scen) max_s = std::max(max_s, s);
  report.scenarios.resize(static_cast<size_t>(max_s + 1));
  for (const auto& [s, sc] : scen) report.scenarios[static_cast<size_t>(s)] = sc;
  for (auto& [key, res] : reps) report.results.push_back(res);
  return report;
}

}  // namespace spatsel
