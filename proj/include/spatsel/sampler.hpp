#pragma once

// Gibbs/Metropolis sampler for the censored spatial regression model with
// the horseshoe+ hierarchy on the regression coefficients.
//
// Sweep order: latents (censored y, mesh weights) -> beta -> shrinkage scales
// -> sigma2 -> (r, rho). The mesh weights are stored sigma-free with prior
// precision Q_rho; sigma2 is updated through the scaled parameterization
// (an interweaving move), which keeps its full conditional inverse-gamma.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <functional>

#include "spatsel/dataset.hpp"
#include "spatsel/gmrf.hpp"
#include "spatsel/mesh.hpp"
#include "spatsel/model.hpp"
#include "spatsel/rng.hpp"

namespace spatsel {

// Gaussian full conditional in mean + upper-Cholesky-of-precision form.
struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol_precision_u;  // draw = mean + U^{-1} z

  Eigen::VectorXd draw(Rng& rng) const;
};

// Conditional for beta given everything else: precision X'X/noise_var +
// diag(1/lambda_i^2), mean residualizes the spatial term.
GaussianConditional beta_full_conditional(const Eigen::MatrixXd& X, const Eigen::MatrixXd& XtX,
                                          const Eigen::VectorXd& resid_minus_spatial,
                                          const Eigen::VectorXd& lambda, double noise_var);

// Inverse-gamma parameters for sigma2 in the scaled parameterization;
// pass n_nodes = 0 for a model with no spatial component.
struct IgParams {
  double shape;
  double rate;
};
IgParams sigma2_full_conditional(double a_sigma, double b_sigma, Eigen::Index n, Eigen::Index n_nodes,
                                 double ss_resid, double ss_spatial, double r, double scale_sq);

// Counters surfaced after a run; clamps follow the 1e-300 floor on the
// shrinkage scales, rejections come from failed proposal factorizations.
struct ChainLog {
  long scale_clamps = 0;
  long rejected_factorizations = 0;
  double accept_rate_r = 0.0;
  double accept_rate_rho = 0.0;
};

class GibbsSampler {
 public:
  GibbsSampler(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
               const Projector& projector, const PrecisionOperator& op);

  ChainState& state() { return state_; }
  const ChainState& state() const { return state_; }
  double rho_max() const { return rho_max_; }
  const ChainLog& log() const { return log_; }
  Rng& rng() { return rng_; }

  void update_latents(Rng& rng);
  void update_beta(Rng& rng);
  void update_horseshoe_plus(Rng& rng);
  void update_sigma2(Rng& rng);
  void update_spatial_hypers(Rng& rng);

  // One full sweep in the documented order; `raw_index` drives burn-in
  // adaptation of the MH steps (1-based, adaptation active while
  // raw_index <= burn_in * thinning).
  void sweep(Rng& rng, long raw_index);

  PosteriorDraws run(const std::function<void(long, long)>& progress = {});

  // Collapsed log posterior of (theta, w) at the current state; censored
  // sites enter through the normal CDF terms.
  double log_posterior() const;

 private:
  double spatial_scale(double sigma, double r) const;
  double scale_multiplier(double r) const;  // sqrt(r) or r, without sigma

  const SpatialDataset& data_;
  ModelConfig cfg_;
  const Projector& proj_;
  const PrecisionOperator& op_;
  Eigen::Index n_, p_, m_;
  double rho_max_;
  Eigen::MatrixXd XtX_;
  SpMat AtA_;
  SpMat Q_;
  double logdet_q_;
  SparseFactor latent_factor_;
  SparseFactor proposal_factor_;
  ChainState state_;
  Rng rng_;
  double step_r_, step_rho_;
  long adapt_until_ = 0;
  bool adapting_ = false;
  long accept_r_ = 0, accept_rho_ = 0, tries_r_ = 0, tries_rho_ = 0;
  ChainLog log_;
};

ChainState init_state(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
                      const Projector& projector, Rng& rng);

PosteriorDraws run_chain(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
                         const Projector& projector, const PrecisionOperator& op,
                         const std::function<void(long, long)>& progress = {},
                         ChainLog* log_out = nullptr);

// Plug-in prediction: masked posterior-mean coefficients plus the posterior
// mean spatial surface projected to the new sites. Coefficients outside the
// mask contribute zero.
Eigen::VectorXd predict(const PosteriorDraws& draws, const Eigen::MatrixXd& new_x,
                        const Eigen::SparseMatrix<double>& new_a,
                        const std::vector<std::uint8_t>& mask,
                        SpatialScale scale = SpatialScale::sqrt_r);

// Same rule with an externally supplied posterior-mean spatial surface
// (used when the stored draws do not carry the mesh weights).
Eigen::VectorXd predict_with_summary(const PosteriorDraws& draws, const Eigen::VectorXd& w_mean,
                                     const Eigen::MatrixXd& new_x,
                                     const Eigen::SparseMatrix<double>& new_a,
                                     const std::vector<std::uint8_t>& mask,
                                     SpatialScale scale = SpatialScale::sqrt_r);

}  // namespace spatsel
