#pragma once

// Synthetic-benchmark harness: scenario generation on a unit-square grid,
// percentile censoring, train/test splits, fit+select+predict per replicate,
// and the aggregated RMSE / mismatch report tables.

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatsel/dataset.hpp"
#include "spatsel/model.hpp"
#include "spatsel/rng.hpp"
#include "spatsel/selection.hpp"

namespace spatsel {

struct ScenarioSpec {
  int grid_side = 40;
  int p = 50;
  double censor_pct = 20.0;
  double rho = 0.12;
  double snr_r = 0.91;  // partial sill to sill ratio
  double zero_pct = 95.0;
  int n_reps = 10;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
  double signal_lo = 0.5, signal_hi = 2.0;  // |beta| range of nonzero coefficients
  bool use_spde_generator = false;          // dense exact covariance otherwise

  void validate() const;
};

struct GeneratedData {
  SpatialDataset data;        // censoring flags unset until apply_censoring
  Eigen::VectorXd true_beta;  // p
  Eigen::VectorXd true_y;     // uncensored responses for scoring
};

GeneratedData gen_scenario_data(const ScenarioSpec& spec, int rep_index, Rng& rng);

struct CensoringResult {
  std::vector<std::uint8_t> flags;
  Eigen::VectorXd limits;  // shared percentile limit, repeated per site
  double limit = 0.0;
};

// Detection limit at the empirical censor_pct percentile (type-7) of y.
CensoringResult apply_censoring(const Eigen::Ref<const Eigen::VectorXd>& y, double censor_pct);

struct TrainTestSplit {
  SpatialDataset train;
  Points test_sites;
  Eigen::MatrixXd test_x;
  Eigen::VectorXd test_true_y;
  std::vector<Eigen::Index> train_idx, test_idx;
};

TrainTestSplit split_train_test(const SpatialDataset& data,
                                const Eigen::Ref<const Eigen::VectorXd>& true_y, double train_frac,
                                Rng& rng);

enum class RmseMode { mean, sum };

double prediction_rmse(const Eigen::Ref<const Eigen::VectorXd>& truth,
                       const Eigen::Ref<const Eigen::VectorXd>& pred, RmseMode mode);

double mismatch_pct(const std::vector<std::uint8_t>& true_mask,
                    const std::vector<std::uint8_t>& selected_mask);

constexpr int kNumMethods = 3;  // Cr, 2means, HSP
extern const SelectionMethod kMethodOrder[kNumMethods];

struct ReplicateResult {
  int scenario = 0;
  int rep = 0;
  bool ok = false;
  std::string error;
  double rmse[kNumMethods] = {0, 0, 0};
  double mismatch[kNumMethods] = {0, 0, 0};
  int selected[kNumMethods] = {0, 0, 0};
};

struct SimOptions {
  double mesh_edge = 0.025;
  double mesh_extension = -1.0;  // < 0: default extension rule
  RmseMode rmse_mode = RmseMode::mean;
  bool refit = false;  // refit the chain on the selected subset before predicting
  int threads = 0;     // 0: hardware concurrency
  double cr_level = 0.95;
  double hsp_cutoff = 0.5;
  double s2m_b = 1.0;
};

struct ScenarioAggregate {
  double mean_rmse[kNumMethods], sd_rmse[kNumMethods];
  double mean_mismatch[kNumMethods], sd_mismatch[kNumMethods];
  int n_ok = 0;
  int n_failed = 0;
};

struct SimulationReport {
  std::vector<ScenarioSpec> scenarios;
  std::vector<ReplicateResult> results;  // scenario-major, replicate-minor order

  ScenarioAggregate aggregate(int scenario_index) const;
};

ReplicateResult run_replicate(const ScenarioSpec& spec, int scenario_index, int rep,
                              const ModelConfig& cfg, const SimOptions& options);

SimulationReport run_scenarios(const std::vector<ScenarioSpec>& grid, const ModelConfig& cfg,
                               const SimOptions& options = {});

// Table CSVs shaped like the benchmark tables (rows zero_pct x rho, columns
// SNR x method, cells "mean (sd)" with two decimals) plus a long-format dump.
void write_report_tables(const SimulationReport& report, const std::string& out_dir);
void write_raw_results(const SimulationReport& report, std::ostream& out);
SimulationReport read_raw_results(std::istream& in);

}  // namespace spatsel
