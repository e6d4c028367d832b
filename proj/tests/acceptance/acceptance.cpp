// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities. Heavier cases parallelize their
// replicates over SPATSEL_TEST_THREADS (default: hardware concurrency).

#include <doctest.h>

#include <Eigen/Cholesky>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "selection_oracles.hpp"
#include "spatsel/diagnostics.hpp"
#include "spatsel/gmrf.hpp"
#include "spatsel/matern.hpp"
#include "spatsel/sampler.hpp"
#include "spatsel/selection.hpp"
#include "spatsel/simulate.hpp"
#include "spatsel/stats.hpp"
#include "spatsel/truncnorm.hpp"

using namespace spatsel;

namespace {

int test_threads() {
  if (const char* env = std::getenv("SPATSEL_TEST_THREADS")) return std::max(1, std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  const int k = std::min(n, test_threads());
  std::vector<std::thread> pool;
  for (int i = 1; i < k; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

void verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  [%s]\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

ModelConfig desk_chain_config() {
  ModelConfig cfg;
  cfg.iterations = 20000;
  cfg.burn_in = 500;
  cfg.thinning = 10;
  return cfg;
}

}  // namespace

TEST_CASE("criterion 1: SPDE correlation fidelity against the exact kernel") {
  const auto t0 = std::chrono::steady_clock::now();
  Points corners(4, 2);
  corners << 0, 0, 1, 0, 0, 1, 1, 1;
  const Mesh mesh = build_mesh(corners, 0.02, default_extension(corners));
  const PrecisionOperator op = make_precision_operator(mesh);
  const double rho = 0.12;
  SparseFactor factor(build_precision(op, rho));

  Rng rng = make_rng(424242);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n_pairs = 200;
  Points sites(2 * n_pairs, 2);
  for (int k = 0; k < n_pairs; ++k) {
    double x1, y1, x2, y2, d;
    do {
      x1 = U(rng);
      y1 = U(rng);
      x2 = U(rng);
      y2 = U(rng);
      d = std::hypot(x2 - x1, y2 - y1);
    } while (d > 0.5);
    sites(2 * k, 0) = x1;
    sites(2 * k, 1) = y1;
    sites(2 * k + 1, 0) = x2;
    sites(2 * k + 1, 1) = y2;
  }
  const Projector proj = project(mesh, sites);
  const Eigen::MatrixXd cov = proj.A * factor.solve(Eigen::MatrixXd(proj.A.transpose()));

  double max_err = 0.0, var_lo = 1e9, var_hi = -1e9;
  for (int k = 0; k < n_pairs; ++k) {
    const double d = (sites.row(2 * k) - sites.row(2 * k + 1)).norm();
    const double exact = matern_correlation(d, rho, 1.0, false);
    max_err = std::max(max_err, std::abs(cov(2 * k, 2 * k + 1) - exact));
    for (int s = 0; s < 2; ++s) {
      const double v = cov(2 * k + s, 2 * k + s);
      var_lo = std::min(var_lo, v);
      var_hi = std::max(var_hi, v);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = max_err <= 0.05 && var_lo >= 0.9 && var_hi <= 1.1 && secs <= 120.0;
  std::ostringstream detail;
  detail << "max corr err " << max_err << " (<= 0.05), site variances [" << var_lo << ", "
         << var_hi << "] (within [0.9, 1.1]), " << secs << " s";
  verdict(1, pass, detail.str());
  CHECK(max_err <= 0.05);
  CHECK(var_lo >= 0.9);
  CHECK(var_hi <= 1.1);
  CHECK(secs <= 120.0);
}

TEST_CASE("criterion 2: truncated-normal sampler moments") {
  Rng rng = make_rng(777);
  bool all_pass = true;
  std::ostringstream detail;
  for (const double upper : {-8.0, -2.0, 0.0, 3.0}) {
    const int n = 100000;
    std::vector<double> xs(n);
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
      xs[static_cast<size_t>(t)] = rtruncnorm(0.0, 1.0, upper, rng);
      acc += xs[static_cast<size_t>(t)];
    }
    const double mean = acc / n;
    double m2 = 0.0, m4 = 0.0;
    for (const double x : xs) {
      const double c = x - mean;
      m2 += c * c;
      m4 += c * c * c * c;
    }
    m2 /= n;
    m4 /= n;
    const double em = truncnorm_upper_mean(0.0, 1.0, upper);
    const double ev = truncnorm_upper_var(0.0, 1.0, upper);
    const double se_mean = std::sqrt(ev / n);
    const double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    const bool ok = std::abs(mean - em) <= 3.0 * se_mean && std::abs(m2 - ev) <= 3.0 * se_var;
    all_pass = all_pass && ok;
    detail << "u=" << upper << " |dmean|/se " << std::abs(mean - em) / se_mean << " |dvar|/se "
           << std::abs(m2 - ev) / se_var << "; ";
    CHECK(std::abs(mean - em) <= 3.0 * se_mean);
    CHECK(std::abs(m2 - ev) <= 3.0 * se_var);
  }
  verdict(2, all_pass, detail.str());
}

TEST_CASE("criterion 3: prior-invariance of the sampler (successive-conditional KS)") {
  const auto t0 = std::chrono::steady_clock::now();
  // fixed design: 10x10 grid, p = 5, a fixed fifth of the sites censored at 0
  const int g = 10;
  const Eigen::Index n = g * g, p = 5;
  SpatialDataset data;
  data.sites.resize(n, 2);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < g; ++i) {
      data.sites(j * g + i, 0) = static_cast<double>(i) / (g - 1);
      data.sites(j * g + i, 1) = static_cast<double>(j) / (g - 1);
    }
  Rng design_rng = make_rng(5150);
  std::normal_distribution<double> N(0.0, 1.0);
  data.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) data.X(i, j) = N(design_rng);
  data.censored.assign(static_cast<size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; i += 5) data.censored[static_cast<size_t>(i)] = 1;
  data.limits = Eigen::VectorXd::Zero(n);
  data.y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) data.y[i] = data.censored[static_cast<size_t>(i)] ? 0.0 : N(design_rng);

  const Mesh mesh = build_mesh(data.sites, 0.1, default_extension(data.sites));
  const Projector proj = project(mesh, data.sites);
  const PrecisionOperator op = make_precision_operator(mesh);

  ModelConfig cfg;
  cfg.iterations = 10;  // driven manually below
  cfg.burn_in = 0;
  cfg.thinning = 1;
  cfg.adapt_mh = false;
  cfg.seed = 99;
  GibbsSampler sampler(data, cfg, mesh, proj, op);
  Rng& rng = sampler.rng();

  const int n_samples = 5000, thin = 60, warmup = 2000;
  std::vector<double> tau_chain, sig_chain, r_chain;
  tau_chain.reserve(n_samples);
  const double sqrt_flag = 1.0;
  (void)sqrt_flag;

  auto redraw_observations = [&]() {
    const ChainState& s = sampler.state();
    const double sc = std::sqrt(s.sigma2) * std::sqrt(s.r);
    const double sd = std::sqrt(s.sigma2 * (1.0 - s.r));
    const Eigen::VectorXd mu = data.X * s.beta + sc * (proj.A * s.w_star);
    std::normal_distribution<double> Z(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
      if (!data.censored[static_cast<size_t>(i)]) {
        data.y[i] = mu[i] + sd * Z(rng);
        sampler.state().y_imputed[i] = data.y[i];
      }
  };

  long raw = 0;
  for (int t = 0; t < warmup; ++t) {
    sampler.sweep(rng, ++raw);
    redraw_observations();
  }
  for (int k = 0; k < n_samples; ++k) {
    for (int t = 0; t < thin; ++t) {
      sampler.sweep(rng, ++raw);
      redraw_observations();
    }
    tau_chain.push_back(sampler.state().tau);
    sig_chain.push_back(sampler.state().sigma2);
    r_chain.push_back(sampler.state().r);
  }

  // fresh draws from the prior
  std::vector<double> tau_prior, sig_prior, r_prior;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < n_samples; ++k) {
    tau_prior.push_back(U(rng));
    r_prior.push_back(U(rng));
    sig_prior.push_back(draw_inverse_gamma(rng, 0.1, 0.1));
  }

  const double crit = ks_critical(1.628, n_samples, n_samples);  // alpha = 0.01
  const double d_tau = ks_statistic(tau_chain, tau_prior);
  const double d_sig = ks_statistic(sig_chain, sig_prior);
  const double d_r = ks_statistic(r_chain, r_prior);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = d_tau < crit && d_sig < crit && d_r < crit && secs <= 1800.0;
  std::ostringstream detail;
  detail << "KS tau " << d_tau << ", sigma2 " << d_sig << ", r " << d_r << " (crit " << crit
         << "), " << secs << " s";
  verdict(3, pass, detail.str());
  CHECK(d_tau < crit);
  CHECK(d_sig < crit);
  CHECK(d_r < crit);
  CHECK(secs <= 1800.0);
}

TEST_CASE("criterion 4: parameter recovery on exact-model data") {
  const auto t0 = std::chrono::steady_clock::now();
  const int n_reps = 10;
  std::vector<int> ok(n_reps, 0);
  std::vector<std::string> notes(n_reps);

  parallel_for(n_reps, [&](int rep) {
    ScenarioSpec spec;
    spec.grid_side = 30;
    spec.p = 10;
    spec.censor_pct = 20.0;
    spec.rho = 0.12;
    spec.snr_r = 0.91;
    spec.zero_pct = 50.0;
    spec.seed = 4000;
    Rng rng = derive_rng(spec.seed, 0, static_cast<std::uint64_t>(rep));
    GeneratedData gen = gen_scenario_data(spec, rep, rng);
    const CensoringResult cens = apply_censoring(gen.data.y, spec.censor_pct);
    gen.data.censored = cens.flags;
    gen.data.limits = cens.limits;

    const Mesh mesh = build_mesh(gen.data.sites, 0.04, default_extension(gen.data.sites));
    const Projector proj = project(mesh, gen.data.sites);
    const PrecisionOperator op = make_precision_operator(mesh);

    ModelConfig cfg = desk_chain_config();
    cfg.seed = mix64(8800 + static_cast<std::uint64_t>(rep));
    const PosteriorDraws draws = run_chain(gen.data, cfg, mesh, proj, op);

    const double rho_med = quantile_type7(draws.values.col(draws.rho_col()), 0.5);
    const double r_med = quantile_type7(draws.values.col(draws.r_col()), 0.5);
    const SelectionResult cr = select_cr(draws, 0.95, false);
    bool signals_found = true;
    for (Eigen::Index j = 0; j < spec.p; ++j)
      if (std::abs(gen.true_beta[j]) >= 1.0 && !cr.mask[static_cast<size_t>(j)])
        signals_found = false;

    const bool rep_ok =
        rho_med >= 0.06 && rho_med <= 0.24 && r_med >= 0.8 && r_med <= 0.97 && signals_found;
    ok[static_cast<size_t>(rep)] = rep_ok ? 1 : 0;
    std::ostringstream note;
    note << "rep " << rep << ": rho_med " << rho_med << ", r_med " << r_med << ", signals "
         << (signals_found ? "ok" : "missed") << (rep_ok ? "" : "  <-- fail");
    notes[static_cast<size_t>(rep)] = note.str();
  });

  int n_ok = 0;
  for (const int o : ok) n_ok += o;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& note : notes) std::cout << "  " << note << "\n";
  const bool pass = n_ok >= 8 && secs <= 7200.0;
  std::ostringstream detail;
  detail << n_ok << "/10 replicates within bounds (need >= 8), " << secs << " s";
  verdict(4, pass, detail.str());
  CHECK(n_ok >= 8);
  CHECK(secs <= 7200.0);
}

TEST_CASE("criterion 5: RMSE trend across the range parameter") {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ScenarioSpec> grid;
  for (const double rho : {0.07, 0.12, 0.20}) {
    ScenarioSpec spec;
    spec.grid_side = 40;
    spec.p = 50;
    spec.censor_pct = 20.0;
    spec.rho = rho;
    spec.snr_r = 0.91;
    spec.zero_pct = 95.0;
    spec.n_reps = 10;
    spec.seed = 5000;
    grid.push_back(spec);
  }
  SimOptions options;
  options.threads = test_threads();
  const SimulationReport report = run_scenarios(grid, desk_chain_config(), options);

  const double rmse_07 = report.aggregate(0).mean_rmse[0];  // Cr column
  const double rmse_12 = report.aggregate(1).mean_rmse[0];
  const double rmse_20 = report.aggregate(2).mean_rmse[0];
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool increasing = rmse_07 < rmse_12 && rmse_12 < rmse_20;
  const bool pass = increasing && secs <= 14400.0;
  std::ostringstream detail;
  detail << "mean Cr RMSE " << rmse_07 << " -> " << rmse_12 << " -> " << rmse_20
         << " (strict increase required), " << secs << " s";
  verdict(5, pass, detail.str());
  CHECK(increasing);
  CHECK(secs <= 14400.0);
}

TEST_CASE("criterion 6: censoring level has limited effect on RMSE") {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ScenarioSpec> grid;
  for (const double cens : {20.0, 45.0}) {
    ScenarioSpec spec;
    spec.grid_side = 40;
    spec.p = 50;
    spec.censor_pct = cens;
    spec.rho = 0.12;
    spec.snr_r = 0.91;
    spec.zero_pct = 50.0;
    spec.n_reps = 10;
    spec.seed = 6000;
    grid.push_back(spec);
  }
  SimOptions options;
  options.threads = test_threads();
  const SimulationReport report = run_scenarios(grid, desk_chain_config(), options);
  const double rmse_20 = report.aggregate(0).mean_rmse[0];
  const double rmse_45 = report.aggregate(1).mean_rmse[0];
  const double rel = std::abs(rmse_45 - rmse_20) / rmse_20;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = rel <= 0.15;
  std::ostringstream detail;
  detail << "mean Cr RMSE 20% " << rmse_20 << " vs 45% " << rmse_45 << ", relative diff " << rel
         << " (<= 0.15), " << secs << " s";
  verdict(6, pass, detail.str());
  CHECK(rel <= 0.15);
}

TEST_CASE("criterion 7: selection-behavior replication") {
  const auto t0 = std::chrono::steady_clock::now();

  // (a) ultra-sparse: HSP picks a subset of the true signals, smallest SD
  ScenarioSpec sparse;
  sparse.grid_side = 40;
  sparse.p = 50;
  sparse.censor_pct = 20.0;
  sparse.rho = 0.12;
  sparse.snr_r = 0.91;
  sparse.zero_pct = 95.0;
  sparse.n_reps = 10;
  sparse.seed = 7000;

  int hsp_subset = 0;
  std::vector<double> mismatch_by_method[kNumMethods];
  {
    std::vector<int> subset_flags(sparse.n_reps, 0);
    std::vector<double> mm[kNumMethods];
    for (int m = 0; m < kNumMethods; ++m) mm[m].resize(sparse.n_reps);
    parallel_for(sparse.n_reps, [&](int rep) {
      Rng rng = derive_rng(sparse.seed, 0, static_cast<std::uint64_t>(rep));
      GeneratedData gen = gen_scenario_data(sparse, rep, rng);
      const CensoringResult cens = apply_censoring(gen.data.y, sparse.censor_pct);
      gen.data.censored = cens.flags;
      gen.data.limits = cens.limits;
      TrainTestSplit split = split_train_test(gen.data, gen.true_y, sparse.train_frac, rng);
      const Mesh mesh = build_mesh(split.train.sites, 0.025, default_extension(split.train.sites));
      const Projector proj = project(mesh, split.train.sites);
      const PrecisionOperator op = make_precision_operator(mesh);
      ModelConfig cfg = desk_chain_config();
      cfg.seed = mix64(7100 + static_cast<std::uint64_t>(rep));
      const PosteriorDraws draws = run_chain(split.train, cfg, mesh, proj, op);

      std::vector<std::uint8_t> true_mask(static_cast<size_t>(sparse.p), 0);
      for (Eigen::Index j = 0; j < sparse.p; ++j)
        true_mask[static_cast<size_t>(j)] = gen.true_beta[j] != 0.0;

      const SelectionResult sel_cr = select_cr(draws, 0.95, false);
      const SelectionResult sel_s2m = select_s2m(draws, 1.0, false);
      const SelectionResult sel_hsp = select_hsp(draws, 0.5, false);
      bool subset = true;
      for (size_t j = 0; j < sel_hsp.mask.size(); ++j)
        if (sel_hsp.mask[j] && !true_mask[j]) subset = false;
      subset_flags[static_cast<size_t>(rep)] = subset ? 1 : 0;
      mm[0][static_cast<size_t>(rep)] = mismatch_pct(true_mask, sel_cr.mask);
      mm[1][static_cast<size_t>(rep)] = mismatch_pct(true_mask, sel_s2m.mask);
      mm[2][static_cast<size_t>(rep)] = mismatch_pct(true_mask, sel_hsp.mask);
    });
    for (const int s : subset_flags) hsp_subset += s;
    for (int m = 0; m < kNumMethods; ++m) mismatch_by_method[m] = mm[m];
  }
  const auto sd_of = [](const std::vector<double>& v) {
    const Eigen::Map<const Eigen::VectorXd> mv(v.data(), static_cast<Eigen::Index>(v.size()));
    return sample_sd(mv);
  };
  const double sd_cr = sd_of(mismatch_by_method[0]);
  const double sd_s2m = sd_of(mismatch_by_method[1]);
  const double sd_hsp = sd_of(mismatch_by_method[2]);
  const bool part_a = hsp_subset >= 9 && sd_hsp <= sd_cr && sd_hsp <= sd_s2m;

  // (b) dense: Cr beats HSP on mean mismatch
  ScenarioSpec dense = sparse;
  dense.zero_pct = 5.0;
  dense.seed = 7500;
  std::vector<double> mm_cr(dense.n_reps), mm_hsp(dense.n_reps);
  parallel_for(dense.n_reps, [&](int rep) {
    Rng rng = derive_rng(dense.seed, 0, static_cast<std::uint64_t>(rep));
    GeneratedData gen = gen_scenario_data(dense, rep, rng);
    const CensoringResult cens = apply_censoring(gen.data.y, dense.censor_pct);
    gen.data.censored = cens.flags;
    gen.data.limits = cens.limits;
    TrainTestSplit split = split_train_test(gen.data, gen.true_y, dense.train_frac, rng);
    const Mesh mesh = build_mesh(split.train.sites, 0.025, default_extension(split.train.sites));
    const Projector proj = project(mesh, split.train.sites);
    const PrecisionOperator op = make_precision_operator(mesh);
    ModelConfig cfg = desk_chain_config();
    cfg.seed = mix64(7600 + static_cast<std::uint64_t>(rep));
    const PosteriorDraws draws = run_chain(split.train, cfg, mesh, proj, op);
    std::vector<std::uint8_t> true_mask(static_cast<size_t>(dense.p), 0);
    for (Eigen::Index j = 0; j < dense.p; ++j)
      true_mask[static_cast<size_t>(j)] = gen.true_beta[j] != 0.0;
    mm_cr[static_cast<size_t>(rep)] = mismatch_pct(true_mask, select_cr(draws, 0.95, false).mask);
    mm_hsp[static_cast<size_t>(rep)] =
        mismatch_pct(true_mask, select_hsp(draws, 0.5, false).mask);
  });
  const double mean_cr =
      Eigen::Map<const Eigen::VectorXd>(mm_cr.data(), static_cast<Eigen::Index>(mm_cr.size()))
          .mean();
  const double mean_hsp =
      Eigen::Map<const Eigen::VectorXd>(mm_hsp.data(), static_cast<Eigen::Index>(mm_hsp.size()))
          .mean();
  const bool part_b = mean_cr < mean_hsp;

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream detail;
  detail << "(a) HSP subset " << hsp_subset << "/10, mismatch SDs Cr " << sd_cr << " / 2means "
         << sd_s2m << " / HSP " << sd_hsp << "; (b) dense mean mismatch Cr " << mean_cr
         << " vs HSP " << mean_hsp << "; " << secs << " s";
  verdict(7, part_a && part_b, detail.str());
  CHECK(hsp_subset >= 9);
  CHECK(sd_hsp <= sd_cr);
  CHECK(sd_hsp <= sd_s2m);
  CHECK(mean_cr < mean_hsp);
}

TEST_CASE("criterion 8: selection rules match brute-force reimplementations") {
  Rng rng = make_rng(888);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  bool all_match = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 20 + static_cast<int>(U(rng) * 180);
    const int p = 2 + static_cast<int>(U(rng) * 8);
    Eigen::MatrixXd beta(rows, p), lambda(rows, p);
    Eigen::VectorXd tau(rows);
    for (int t = 0; t < rows; ++t) {
      tau[t] = U(rng);
      for (int j = 0; j < p; ++j) {
        const double shift = (j % 3 == 0) ? 1.5 * ((j % 2) ? -1 : 1) : 0.0;
        beta(t, j) = shift + N(rng) * (0.2 + U(rng));
        lambda(t, j) = std::abs(N(rng)) * 2.0 + 1e-3;
      }
    }
    PosteriorDraws draws;
    draws.p = p;
    draws.values.setZero(rows, 2 * p + 4);
    draws.values.leftCols(p) = beta;
    draws.values.middleCols(p, p) = lambda;
    draws.values.col(draws.tau_col()) = tau;
    draws.values.col(draws.sigma2_col()).setOnes();
    draws.values.col(draws.r_col()).setConstant(0.5);
    draws.values.col(draws.rho_col()).setConstant(0.1);

    const bool match = select_cr(draws, 0.95).mask == selection_oracle::cr(beta, 0.95) &&
                       select_hsp(draws, 0.5).mask == selection_oracle::hsp(lambda, tau, 0.5) &&
                       select_s2m(draws, 1.0).mask == selection_oracle::s2m(beta);
    all_match = all_match && match;
    CHECK(match);
  }
  verdict(8, all_match, "50 randomized draw matrices, exact mask agreement for Cr/HSP/S2M");
}

TEST_CASE("criterion 9: metric exactness and table cell format") {
  Eigen::VectorXd truth(2), pred(2);
  truth << 0, 0;
  pred << 3, 4;
  const bool rmse_ok = prediction_rmse(truth, pred, RmseMode::sum) == doctest::Approx(5.0) &&
                       prediction_rmse(truth, pred, RmseMode::mean) ==
                           doctest::Approx(std::sqrt(12.5)) &&
                       prediction_rmse(truth, truth, RmseMode::mean) == 0.0;
  std::vector<std::uint8_t> a(100, 0), b(100, 0);
  b[1] = 1;
  b[50] = 1;
  std::vector<std::uint8_t> c1(4, 1), c0(4, 0);
  const bool mism_ok = mismatch_pct(a, a) == 0.0 && mismatch_pct(a, b) == doctest::Approx(2.0) &&
                       mismatch_pct(c1, c0) == doctest::Approx(100.0);

  // emitted table cells use "%.2f (%.2f)"
  SimulationReport report;
  ScenarioSpec spec;
  spec.n_reps = 2;
  report.scenarios.push_back(spec);
  for (int rep = 0; rep < 2; ++rep) {
    ReplicateResult res;
    res.scenario = 0;
    res.rep = rep;
    res.ok = true;
    for (int m = 0; m < kNumMethods; ++m) {
      res.rmse[m] = 1.234 + rep;
      res.mismatch[m] = 10.0 + rep;
    }
    report.results.push_back(res);
  }
  write_report_tables(report, "/tmp/spatsel_accept_tables");
  std::ifstream in("/tmp/spatsel_accept_tables/table_rmse_cens20.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  const bool cell_ok = row.find("1.73 (0.71)") != std::string::npos;  // mean 1.734, sd 0.7071

  const bool pass = rmse_ok && mism_ok && cell_ok;
  std::ostringstream detail;
  detail << "metrics exact: " << (rmse_ok && mism_ok ? "yes" : "no") << ", cell format row '"
         << row << "'";
  verdict(9, pass, detail.str());
  CHECK(rmse_ok);
  CHECK(mism_ok);
  CHECK(cell_ok);
}

TEST_CASE("criterion 10: end-to-end determinism of the simulate pipeline") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto run_once = [&](const std::string& dir) {
    ScenarioSpec spec;
    spec.grid_side = 20;
    spec.p = 10;
    spec.censor_pct = 20.0;
    spec.rho = 0.12;
    spec.snr_r = 0.91;
    spec.zero_pct = 80.0;
    spec.n_reps = 2;
    spec.seed = 321;
    ModelConfig cfg;
    cfg.iterations = 2000;
    cfg.burn_in = 20;
    cfg.thinning = 10;
    SimOptions options;
    options.mesh_edge = 0.06;
    options.threads = test_threads();
    const SimulationReport report = run_scenarios({spec}, cfg, options);
    write_report_tables(report, dir);
    std::ofstream raw(dir + "/raw_results.csv");
    write_raw_results(report, raw);
  };
  system("mkdir -p /tmp/spatsel_accept_det_a /tmp/spatsel_accept_det_b");
  run_once("/tmp/spatsel_accept_det_a");
  run_once("/tmp/spatsel_accept_det_b");

  bool identical = true;
  for (const char* name : {"raw_results.csv", "table_rmse_cens20.csv", "table_mismatch_cens20.csv"}) {
    std::ifstream fa(std::string("/tmp/spatsel_accept_det_a/") + name);
    std::ifstream fb(std::string("/tmp/spatsel_accept_det_b/") + name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str() || sa.str().empty()) identical = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = identical && secs <= 600.0;  // smoke config stays under ten minutes
  std::ostringstream detail;
  detail << (identical ? "byte-identical report CSVs" : "outputs differ") << ", " << secs
         << " s (smoke bound 600 s)";
  verdict(10, pass, detail.str());
  CHECK(identical);
  CHECK(secs <= 600.0);
}
