#pragma once

// MCMC configuration, full chain state, and the stored thinned draws.

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spatsel {

// Reading of the spatial term in the observation mean: sigma*sqrt(r)*A*w
// makes the implied covariance match the exact model's r*Sigma share;
// sigma*r*A*w reproduces the literal hierarchical form.
enum class SpatialScale { sqrt_r, r };

struct ModelConfig {
  double a_sigma = 0.1;
  double b_sigma = 0.1;
  double rho_max = 0.0;  // <= 0 means 0.5 * max pairwise site distance
  long iterations = 100000;
  long burn_in = 2000;  // counted in stored (post-thinning) draws
  long thinning = 10;
  double mh_step_rho = 0.3;  // log-scale random walk
  double mh_step_r = 0.3;    // logit-scale random walk
  SpatialScale spatial_scale = SpatialScale::sqrt_r;
  bool adapt_mh = true;  // Robbins-Monro toward 0.35 acceptance during burn-in
  bool store_w = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ChainState {
  Eigen::VectorXd beta;     // p
  Eigen::VectorXd lambda;   // p, local scales
  Eigen::VectorXd eta;      // p, second-layer scales
  Eigen::VectorXd nu_aux;   // p, inverse-gamma auxiliaries for lambda
  Eigen::VectorXd xi_aux;   // p, inverse-gamma auxiliaries for eta
  double tau = 0.5;
  double sigma2 = 1.0;
  double r = 0.5;
  double rho = 0.1;
  Eigen::VectorXd w_star;     // n_nodes, unit-variance GMRF weights
  Eigen::VectorXd y_imputed;  // n, equals y where uncensored
};

// Thinned post-burn-in draws. Column layout: beta_1..beta_p, lambda_1..lambda_p,
// tau, sigma2, r, rho. Mesh weights are kept separately when stored.
struct PosteriorDraws {
  Eigen::MatrixXd values;
  Eigen::MatrixXd w_draws;  // rows x n_nodes, or 0 x 0 when not stored
  Eigen::Index p = 0;

  Eigen::Index rows() const { return values.rows(); }
  bool has_w() const { return w_draws.size() > 0; }

  Eigen::Index beta_col(Eigen::Index j) const { return j; }
  Eigen::Index lambda_col(Eigen::Index j) const { return p + j; }
  Eigen::Index tau_col() const { return 2 * p; }
  Eigen::Index sigma2_col() const { return 2 * p + 1; }
  Eigen::Index r_col() const { return 2 * p + 2; }
  Eigen::Index rho_col() const { return 2 * p + 3; }

  std::vector<std::string> column_names() const;
  void to_csv(std::ostream& out) const;
  static PosteriorDraws from_csv(std::istream& in);
};

}  // namespace spatsel
