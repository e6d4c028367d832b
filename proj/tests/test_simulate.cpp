#include <doctest.h>

#include <cmath>
#include <set>

#include "spatsel/matern.hpp"
#include "spatsel/simulate.hpp"

using namespace spatsel;

TEST_CASE("apply_censoring pinned percentile") {
  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) y[i] = i + 1;
  const CensoringResult cens = apply_censoring(y, 20.0);
  CHECK(cens.limit == doctest::Approx(20.8));
  int flagged = 0;
  for (const auto f : cens.flags) flagged += f;
  CHECK(flagged == 20);
}

TEST_CASE("apply_censoring flags everything when responses are equal") {
  const CensoringResult cens = apply_censoring(Eigen::VectorXd::Constant(8, 3.0), 20.0);
  int flagged = 0;
  for (const auto f : cens.flags) flagged += f;
  CHECK(flagged == 8);
}

TEST_CASE("apply_censoring fraction tracks the target for gaussian data") {
  Rng rng = make_rng(12);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd y(1600);
  for (int i = 0; i < 1600; ++i) y[i] = N(rng);
  for (double pct : {20.0, 45.0}) {
    const CensoringResult cens = apply_censoring(y, pct);
    double flagged = 0;
    for (const auto f : cens.flags) flagged += f;
    const double got = 100.0 * flagged / 1600.0;
    CHECK(std::abs(got - pct) < 5.0);
  }
}

TEST_CASE("split_train_test partitions cleanly and deterministically") {
  ScenarioSpec spec;
  spec.grid_side = 4;
  spec.p = 3;
  spec.zero_pct = 50;
  spec.seed = 5;
  Rng rng = make_rng(2);
  GeneratedData gen = gen_scenario_data(spec, 0, rng);

  Rng r1 = make_rng(9), r2 = make_rng(9);
  const TrainTestSplit a = split_train_test(gen.data, gen.true_y, 0.8, r1);
  const TrainTestSplit b = split_train_test(gen.data, gen.true_y, 0.8, r2);
  CHECK(a.train_idx == b.train_idx);

  CHECK(a.train.n() == 13);  // llround(0.8 * 16)
  CHECK(a.test_sites.rows() == 3);
  std::set<Eigen::Index> all(a.train_idx.begin(), a.train_idx.end());
  for (const auto i : a.test_idx) CHECK(all.insert(i).second);
  CHECK(all.size() == 16);
}

TEST_CASE("prediction_rmse modes") {
  Eigen::VectorXd truth(2), pred(2);
  truth << 0, 0;
  pred << 3, 4;
  CHECK(prediction_rmse(truth, pred, RmseMode::sum) == doctest::Approx(5.0));
  CHECK(prediction_rmse(truth, pred, RmseMode::mean) == doctest::Approx(std::sqrt(12.5)));
  CHECK(prediction_rmse(truth, truth, RmseMode::sum) == doctest::Approx(0.0));
  CHECK(prediction_rmse(truth, truth, RmseMode::mean) == doctest::Approx(0.0));
  Eigen::VectorXd bad(3);
  CHECK_THROWS(prediction_rmse(truth, bad, RmseMode::mean));
}

TEST_CASE("prediction_rmse scale and permutation invariance") {
  Rng rng = make_rng(3);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd t(40), p(40);
  for (int i = 0; i < 40; ++i) {
    t[i] = N(rng);
    p[i] = N(rng);
  }
  const double base = prediction_rmse(t, p, RmseMode::mean);
  CHECK(prediction_rmse(-2.5 * t, -2.5 * p, RmseMode::mean) ==
        doctest::Approx(2.5 * base).epsilon(1e-12));
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(40);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + 40, rng);
  CHECK(prediction_rmse(perm * t, perm * p, RmseMode::mean) == doctest::Approx(base));
}

TEST_CASE("mismatch_pct definition and symmetry") {
  std::vector<std::uint8_t> a(100, 0), b(100, 0);
  CHECK(mismatch_pct(a, b) == doctest::Approx(0.0));
  b[3] = 1;
  b[77] = 1;
  CHECK(mismatch_pct(a, b) == doctest::Approx(2.0));
  CHECK(mismatch_pct(b, a) == doctest::Approx(2.0));
  std::vector<std::uint8_t> c(4, 1), d(4, 0);
  CHECK(mismatch_pct(c, d) == doctest::Approx(100.0));
}

TEST_CASE("gen_scenario_data zero fraction boundaries") {
  Rng rng = make_rng(8);
  ScenarioSpec spec;
  spec.grid_side = 5;
  spec.p = 7;
  spec.zero_pct = 100;
  GeneratedData all_zero = gen_scenario_data(spec, 0, rng);
  CHECK(all_zero.true_beta.cwiseAbs().maxCoeff() == 0.0);

  spec.zero_pct = 0;
  GeneratedData none_zero = gen_scenario_data(spec, 0, rng);
  CHECK((none_zero.true_beta.array() != 0.0).count() == 7);
  for (int j = 0; j < 7; ++j) {
    const double mag = std::abs(none_zero.true_beta[j]);
    CHECK(mag >= 0.5);
    CHECK(mag <= 2.0);
  }
}

TEST_CASE("gen_scenario_data with snr near zero is plain regression noise") {
  Rng rng = make_rng(44);
  ScenarioSpec spec;
  spec.grid_side = 12;
  spec.p = 2;
  spec.zero_pct = 0;
  spec.snr_r = 1e-9;
  const GeneratedData gen = gen_scenario_data(spec, 0, rng);
  const Eigen::VectorXd resid = gen.true_y - gen.data.X * gen.true_beta;
  // flat variogram: binned squared increments agree at short and long distance
  double short_acc = 0, long_acc = 0;
  int short_n = 0, long_n = 0;
  for (Eigen::Index i = 0; i < gen.data.n(); ++i)
    for (Eigen::Index j = i + 1; j < gen.data.n(); ++j) {
      const double d = (gen.data.sites.row(i) - gen.data.sites.row(j)).norm();
      const double sq = (resid[i] - resid[j]) * (resid[i] - resid[j]);
      if (d < 0.15) {
        short_acc += sq;
        ++short_n;
      } else if (d > 0.6) {
        long_acc += sq;
        ++long_n;
      }
    }
  const double gamma_short = 0.5 * short_acc / short_n;
  const double gamma_long = 0.5 * long_acc / long_n;
  CHECK(gamma_short == doctest::Approx(gamma_long).epsilon(0.25));
}

TEST_CASE("gen_scenario_data variogram follows the exact kernel") {
  // grid 21 puts lattice spacing at exactly 0.05, so the requested lags
  // 0.05 / 0.1 / 0.2 are populated with exact-distance pairs
  ScenarioSpec spec;
  spec.grid_side = 21;
  spec.p = 2;
  spec.zero_pct = 50;
  spec.rho = 0.12;
  spec.snr_r = 0.91;
  const double lags[3] = {0.05, 0.1, 0.2};
  double acc[3] = {0, 0, 0};
  long cnt[3] = {0, 0, 0};
  for (int rep = 0; rep < 10; ++rep) {
    Rng rng = derive_rng(99, 0, static_cast<std::uint64_t>(rep));
    const GeneratedData gen = gen_scenario_data(spec, rep, rng);
    const Eigen::VectorXd z = gen.true_y - gen.data.X * gen.true_beta;
    for (Eigen::Index i = 0; i < gen.data.n(); ++i)
      for (Eigen::Index j = i + 1; j < gen.data.n(); ++j) {
        const double d = (gen.data.sites.row(i) - gen.data.sites.row(j)).norm();
        for (int k = 0; k < 3; ++k)
          if (std::abs(d - lags[k]) < 1e-9) {
            acc[k] += 0.5 * (z[i] - z[j]) * (z[i] - z[j]);
            ++cnt[k];
          }
      }
  }
  for (int k = 0; k < 3; ++k) {
    REQUIRE(cnt[k] > 0);
    const double gamma_hat = acc[k] / cnt[k];
    const double gamma_exact = 1.0 - spec.snr_r * matern_correlation(lags[k], spec.rho, 1.0, false);
    CHECK(std::abs(gamma_hat - gamma_exact) < 0.1);
  }
}

TEST_CASE("gen_scenario_data dense-path size guard") {
  ScenarioSpec spec;
  spec.grid_side = 80;  // 6400 sites
  spec.p = 2;
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(gen_scenario_data(spec, 0, rng), config_error);
}

TEST_CASE("single-scenario aggregate bookkeeping") {
  SimulationReport report;
  ScenarioSpec spec;
  spec.n_reps = 1;
  report.scenarios.push_back(spec);
  ReplicateResult res;
  res.scenario = 0;
  res.rep = 0;
  res.ok = true;
  for (int m = 0; m < kNumMethods; ++m) {
    res.rmse[m] = 1.5;
    res.mismatch[m] = 4.0;
  }
  report.results.push_back(res);
  const ScenarioAggregate agg = report.aggregate(0);
  CHECK(agg.n_ok == 1);
  for (int m = 0; m < kNumMethods; ++m) {
    CHECK(agg.mean_rmse[m] == doctest::Approx(1.5));
    CHECK(agg.sd_rmse[m] == doctest::Approx(0.0));  // single replicate: SD 0 by convention
  }
}
