#include "spatsel/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spatsel/errors.hpp"
#include "spatsel/special.hpp"
#include "spatsel/truncnorm.hpp"

namespace spatsel {

namespace {

constexpr double kScaleFloor = 1e-300;
constexpr double kTermCap = 1e300;

double clamp_scale(double x, long& clamps) {
  if (x < kScaleFloor) {
    ++clamps;
    return kScaleFloor;
  }
  return x;
}

double logit(double x) { return std::log(x / (1.0 - x)); }
double inv_logit(double l) { return 1.0 / (1.0 + std::exp(-l)); }

}  // namespace

Eigen::VectorXd GaussianConditional::draw(Rng& rng) const {
  Eigen::VectorXd z(mean.size());
  std::normal_distribution<double> N(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = N(rng);
  return mean + chol_precision_u.triangularView<Eigen::Upper>().solve(z);
}

GaussianConditional beta_full_conditional(const Eigen::MatrixXd& X, const Eigen::MatrixXd& XtX,
                                          const Eigen::VectorXd& resid_minus_spatial,
                                          const Eigen::VectorXd& lambda, double noise_var) {
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd prec = XtX / noise_var;
  for (Eigen::Index j = 0; j < p; ++j) prec(j, j) += 1.0 / (lambda[j] * lambda[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success)
    throw numeric_error("update_beta: conditional precision not positive definite");
  GaussianConditional out;
  out.mean = llt.solve(X.transpose() * resid_minus_spatial / noise_var);
  out.chol_precision_u = llt.matrixU();
  return out;
}

IgParams sigma2_full_conditional(double a_sigma, double b_sigma, Eigen::Index n,
                                 Eigen::Index n_nodes, double ss_resid, double ss_spatial,
                                 double r, double scale_sq) {
  IgParams out;
  out.shape = a_sigma + 0.5 * static_cast<double>(n) + 0.5 * static_cast<double>(n_nodes);
  out.rate = b_sigma + ss_resid / (2.0 * (1.0 - r));
  if (n_nodes > 0) out.rate += ss_spatial / (2.0 * scale_sq);
  return out;
}

ChainState init_state(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
                      const Projector& projector, Rng& /*rng*/) {
  if (projector.A.rows() != data.n() || projector.A.cols() != mesh.num_nodes())
    throw data_error("init_state: projector dimensions do not match data and mesh");
  const Eigen::Index n = data.n(), p = data.p();

  ChainState s;
  s.beta = Eigen::VectorXd::Zero(p);
  s.lambda = Eigen::VectorXd::Ones(p);
  s.eta = Eigen::VectorXd::Ones(p);
  s.nu_aux = Eigen::VectorXd::Ones(p);
  s.xi_aux = Eigen::VectorXd::Ones(p);
  s.tau = 0.5;
  s.r = 0.5;

  double acc = 0.0, acc2 = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.censored[static_cast<size_t>(i)]) continue;
    acc += data.y[i];
    acc2 += data.y[i] * data.y[i];
    ++k;
  }
  s.sigma2 = 1.0;
  if (k >= 2) {
    const double var = (acc2 - acc * acc / k) / (k - 1.0);
    if (var > 0.0) s.sigma2 = var;
  }

  const double rho_max = cfg.rho_max > 0.0 ? cfg.rho_max : 0.5 * max_domain_range(data.sites);
  s.rho = rho_max / 4.0;
  s.w_star = Eigen::VectorXd::Zero(mesh.num_nodes());
  s.y_imputed = data.y;
  const double off = 0.1 * std::sqrt(s.sigma2);
  for (Eigen::Index i = 0; i < n; ++i)
    if (data.censored[static_cast<size_t>(i)]) s.y_imputed[i] = data.limits[i] - off;
  return s;
}

GibbsSampler::GibbsSampler(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
                           const Projector& projector, const PrecisionOperator& op)
    : data_(data), cfg_(cfg), proj_(projector), op_(op), rng_(make_rng(cfg.seed)) {
  data_.validate();
  cfg_.validate();
  n_ = data_.n();
  p_ = data_.p();
  m_ = mesh.num_nodes();
  rho_max_ = cfg_.rho_max > 0.0 ? cfg_.rho_max : 0.5 * max_domain_range(data_.sites);
  XtX_ = data_.X.transpose() * data_.X;
  AtA_ = SpMat(proj_.A.transpose() * proj_.A);
  state_ = init_state(data_, cfg_, mesh, projector, rng_);
  Q_ = build_precision(op_, state_.rho);
  proposal_factor_.factorize(Q_);
  logdet_q_ = proposal_factor_.log_det();
  step_r_ = cfg_.mh_step_r;
  step_rho_ = cfg_.mh_step_rho;
  adapt_until_ = cfg_.burn_in * cfg_.thinning;
}

double GibbsSampler::scale_multiplier(double r) const {
  return cfg_.spatial_scale == SpatialScale::sqrt_r ? std::sqrt(r) : r;
}

double GibbsSampler::spatial_scale(double sigma, double r) const {
  return sigma * scale_multiplier(r);
}

void GibbsSampler::update_latents(Rng& rng) {
  const double sigma = std::sqrt(state_.sigma2);
  const double s = spatial_scale(sigma, state_.r);
  const double v = state_.sigma2 * (1.0 - state_.r);
  const Eigen::VectorXd xb = data_.X * state_.beta;
  const Eigen::VectorXd aw = proj_.A * state_.w_star;

  const double sd = std::sqrt(v);
  for (Eigen::Index i = 0; i < n_; ++i)
    if (data_.censored[static_cast<size_t>(i)])
      state_.y_imputed[i] = rtruncnorm(xb[i] + s * aw[i], sd, data_.limits[i], rng);

  SpMat P = Q_ + SpMat((s * s / v) * AtA_);
  latent_factor_.factorize(P);
  const Eigen::VectorXd rhs = (s / v) * (proj_.A.transpose() * (state_.y_imputed - xb));
  state_.w_star = latent_factor_.solve(rhs) + latent_factor_.sample(rng);
}

void GibbsSampler::update_beta(Rng& rng) {
  const double s = spatial_scale(std::sqrt(state_.sigma2), state_.r);
  const double v = state_.sigma2 * (1.0 - state_.r);
  const Eigen::VectorXd resid = state_.y_imputed - s * (proj_.A * state_.w_star);
  state_.beta = beta_full_conditional(data_.X, XtX_, resid, state_.lambda, v).draw(rng);
}

void GibbsSampler::update_horseshoe_plus(Rng& rng) {
  const double tau2 = state_.tau * state_.tau;
  for (Eigen::Index j = 0; j < p_; ++j) {
    const double beta2 = state_.beta[j] * state_.beta[j];
    const double lam2 =
        clamp_scale(draw_inverse_gamma(rng, 1.0, 1.0 / state_.nu_aux[j] + 0.5 * beta2),
                    log_.scale_clamps);
    const double eta2_old = state_.eta[j] * state_.eta[j];
    state_.nu_aux[j] = clamp_scale(
        draw_inverse_gamma(rng, 1.0, 1.0 / lam2 + 1.0 / (tau2 * eta2_old)), log_.scale_clamps);
    const double eta2 = clamp_scale(
        draw_inverse_gamma(rng, 1.0, 1.0 / state_.xi_aux[j] + 1.0 / (tau2 * state_.nu_aux[j])),
        log_.scale_clamps);
    state_.xi_aux[j] =
        clamp_scale(draw_inverse_gamma(rng, 1.0, 1.0 + 1.0 / eta2), log_.scale_clamps);
    state_.lambda[j] = std::sqrt(lam2);
    state_.eta[j] = std::sqrt(eta2);
  }

  // tau | nu, eta on (0,1): density ~ tau^{-p} exp(-S/tau^2); unimodal, so the
  // shrinkage-only slice step on the bounded support is exact.
  double ssum = 0.0;
  for (Eigen::Index j = 0; j < p_; ++j) {
    const double term = 1.0 / (state_.nu_aux[j] * state_.eta[j] * state_.eta[j]);
    ssum += std::min(term, kTermCap);
  }
  ssum = std::min(ssum, kTermCap);
  const double pd = static_cast<double>(p_);
  const auto logf = [&](double t) { return -pd * std::log(t) - ssum / (t * t); };
  const double level = logf(state_.tau) - draw_exponential(rng);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double cand = lo + draw_uniform(rng) * (hi - lo);
    if (cand > 0.0 && logf(cand) >= level) {
      state_.tau = cand;
      break;
    }
    if (cand < state_.tau)
      lo = cand;
    else
      hi = cand;
  }
}

void GibbsSampler::update_sigma2(Rng& rng) {
  // interweaving move: rescale the latent to omega = sigma*g(r)*w, draw sigma2
  // from its conjugate conditional there, then map the latent back
  const double g = scale_multiplier(state_.r);
  const double sigma_old = std::sqrt(state_.sigma2);
  const Eigen::VectorXd omega = (sigma_old * g) * state_.w_star;
  const Eigen::VectorXd resid = state_.y_imputed - data_.X * state_.beta - proj_.A * omega;
  const double ss_resid = resid.squaredNorm();
  const double ss_spatial = omega.dot(Q_ * omega);
  const IgParams ig = sigma2_full_conditional(cfg_.a_sigma, cfg_.b_sigma, n_, m_, ss_resid,
                                              ss_spatial, state_.r, g * g);
  state_.sigma2 = draw_inverse_gamma(rng, ig.shape, ig.rate);
  state_.w_star = omega / (std::sqrt(state_.sigma2) * g);
}

void GibbsSampler::update_spatial_hypers(Rng& rng) {
  const double sigma = std::sqrt(state_.sigma2);
  const Eigen::VectorXd base = state_.y_imputed - data_.X * state_.beta;
  const Eigen::VectorXd aw = proj_.A * state_.w_star;

  const auto loglik_r = [&](double r) {
    const double v = state_.sigma2 * (1.0 - r);
    const double ss = (base - sigma * scale_multiplier(r) * aw).squaredNorm();
    return -0.5 * static_cast<double>(n_) * std::log(v) - ss / (2.0 * v);
  };

  // r: random walk on the logit scale, U(0,1) prior
  ++tries_r_;
  {
    const double l0 = logit(state_.r);
    const double l1 = l0 + step_r_ * draw_normal(rng);
    const double r1 = inv_logit(l1);
    if (r1 > 0.0 && r1 < 1.0) {
      const double lr = loglik_r(r1) - loglik_r(state_.r) + std::log(r1 * (1.0 - r1)) -
                        std::log(state_.r * (1.0 - state_.r));
      bool accept = lr >= 0.0 || std::log(draw_uniform(rng)) < lr;
      if (accept) {
        state_.r = r1;
        ++accept_r_;
      }
    }
  }

  // rho: random walk on the log scale, reflected below log(rho_max)
  ++tries_rho_;
  {
    const double lmax = std::log(rho_max_);
    double l1 = std::log(state_.rho) + step_rho_ * draw_normal(rng);
    int guard = 0;
    while (l1 > lmax && guard++ < 64) l1 = 2.0 * lmax - l1;
    const double rho1 = std::exp(l1);
    bool accept = false;
    if (rho1 > 0.0 && rho1 < rho_max_) {
      try {
        SpMat q1 = build_precision(op_, rho1);
        proposal_factor_.factorize(q1);
        const double logdet1 = proposal_factor_.log_det();
        const double quad0 = state_.w_star.dot(Q_ * state_.w_star);
        const double quad1 = state_.w_star.dot(q1 * state_.w_star);
        const double lr = 0.5 * (logdet1 - logdet_q_) - 0.5 * (quad1 - quad0) +
                          (std::log(rho1) - std::log(state_.rho));
        accept = lr >= 0.0 || std::log(draw_uniform(rng)) < lr;
        if (accept) {
          state_.rho = rho1;
          Q_ = std::move(q1);
          logdet_q_ = logdet1;
          ++accept_rho_;
        }
      } catch (const numeric_error&) {
        ++log_.rejected_factorizations;  // proposal auto-rejected
      }
    }
  }
}

void GibbsSampler::sweep(Rng& rng, long raw_index) {
  adapting_ = cfg_.adapt_mh && raw_index <= adapt_until_;
  const long tries_r_before = tries_r_, acc_r_before = accept_r_;
  const long tries_rho_before = tries_rho_, acc_rho_before = accept_rho_;

  update_latents(rng);
  update_beta(rng);
  update_horseshoe_plus(rng);
  update_sigma2(rng);
  update_spatial_hypers(rng);

  if (adapting_) {
    const double gain = 2.0 / std::sqrt(static_cast<double>(raw_index) + 10.0);
    if (tries_r_ > tries_r_before)
      step_r_ *= std::exp(gain * ((accept_r_ > acc_r_before ? 1.0 : 0.0) - 0.35));
    if (tries_rho_ > tries_rho_before)
      step_rho_ *= std::exp(gain * ((accept_rho_ > acc_rho_before ? 1.0 : 0.0) - 0.35));
    step_r_ = std::clamp(step_r_, 1e-3, 10.0);
    step_rho_ = std::clamp(step_rho_, 1e-3, 10.0);
  }
}

PosteriorDraws GibbsSampler::run(const std::function<void(long, long)>& progress) {
  const long total = cfg_.iterations;
  const long kept_total = total / cfg_.thinning;
  const long stored_total = kept_total - cfg_.burn_in;
  if (stored_total <= 0) throw config_error("run_chain: no draws would survive burn-in");

  PosteriorDraws draws;
  draws.p = p_;
  draws.values.resize(stored_total, 2 * p_ + 4);
  if (cfg_.store_w) draws.w_draws.resize(stored_total, m_);

  long kept = 0, stored = 0;
  for (long it = 1; it <= total; ++it) {
    try {
      sweep(rng_, it);
    } catch (const numeric_error& e) {
      std::ostringstream msg;
      msg << "sweep " << it << ": " << e.what();
      throw numeric_error(msg.str());
    }
    if (it % cfg_.thinning == 0) {
      ++kept;
      if (kept > cfg_.burn_in) {
        draws.values.block(stored, 0, 1, p_) = state_.beta.transpose();
        draws.values.block(stored, p_, 1, p_) = state_.lambda.transpose();
        draws.values(stored, draws.tau_col()) = state_.tau;
        draws.values(stored, draws.sigma2_col()) = state_.sigma2;
        draws.values(stored, draws.r_col()) = state_.r;
        draws.values(stored, draws.rho_col()) = state_.rho;
        if (cfg_.store_w) draws.w_draws.row(stored) = state_.w_star.transpose();
        ++stored;
      }
    }
    if (progress && it % 1000 == 0) progress(it, total);
  }

  log_.accept_rate_r = tries_r_ ? static_cast<double>(accept_r_) / tries_r_ : 0.0;
  log_.accept_rate_rho = tries_rho_ ? static_cast<double>(accept_rho_) / tries_rho_ : 0.0;
  return draws;
}

double GibbsSampler::log_posterior() const {
  const ChainState& s = state_;
  const double sigma = std::sqrt(s.sigma2);
  const double sc = spatial_scale(sigma, s.r);
  const double v = s.sigma2 * (1.0 - s.r);
  const double sd = std::sqrt(v);
  const Eigen::VectorXd mu = data_.X * s.beta + sc * (proj_.A * s.w_star);

  double lp = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) {
    if (data_.censored[static_cast<size_t>(i)]) {
      lp += log_normal_cdf((data_.limits[i] - mu[i]) / sd);
    } else {
      const double z = (data_.y[i] - mu[i]) / sd;
      lp += -0.5 * z * z - std::log(sd);
    }
  }
  lp += 0.5 * logdet_q_ - 0.5 * s.w_star.dot(Q_ * s.w_star);
  for (Eigen::Index j = 0; j < p_; ++j) {
    const double lam = s.lambda[j], eta = s.eta[j], se = s.tau * eta;
    lp += -std::log(lam) - s.beta[j] * s.beta[j] / (2.0 * lam * lam);
    lp += -std::log(se) - std::log1p((lam / se) * (lam / se));
    lp += -std::log1p(eta * eta);
  }
  if (!(s.tau > 0.0 && s.tau < 1.0 && s.r > 0.0 && s.r < 1.0 && s.rho > 0.0 && s.rho < rho_max_))
    return -std::numeric_limits<double>::infinity();
  lp += -(cfg_.a_sigma + 1.0) * std::log(s.sigma2) - cfg_.b_sigma / s.sigma2;
  return lp;
}

PosteriorDraws run_chain(const SpatialDataset& data, const ModelConfig& cfg, const Mesh& mesh,
                         const Projector& projector, const PrecisionOperator& op,
                         const std::function<void(long, long)>& progress, ChainLog* log_out) {
  GibbsSampler sampler(data, cfg, mesh, projector, op);
  PosteriorDraws draws = sampler.run(progress);
  if (log_out) *log_out = sampler.log();
  return draws;
}

Eigen::VectorXd predict(const PosteriorDraws& draws, const Eigen::MatrixXd& new_x,
                        const Eigen::SparseMatrix<double>& new_a,
                        const std::vector<std::uint8_t>& mask, SpatialScale scale) {
  if (!draws.has_w()) throw data_error("predict: draws were stored without mesh weights");
  return predict_with_summary(draws, draws.w_draws.colwise().mean(), new_x, new_a, mask, scale);
}

Eigen::VectorXd predict_with_summary(const PosteriorDraws& draws, const Eigen::VectorXd& w_mean,
                                     const Eigen::MatrixXd& new_x,
                                     const Eigen::SparseMatrix<double>& new_a,
                                     const std::vector<std::uint8_t>& mask, SpatialScale scale) {
  if (draws.rows() < 1) throw data_error("predict: no stored draws");
  if (static_cast<Eigen::Index>(mask.size()) != draws.p)
    throw data_error("predict: mask length must equal p");
  if (new_x.cols() != draws.p) throw data_error("predict: new_x column count must equal p");
  if (new_a.rows() != new_x.rows() || new_a.cols() != w_mean.size())
    throw data_error("predict: projector dimensions do not match");

  Eigen::VectorXd beta_mean = Eigen::VectorXd::Zero(draws.p);
  for (Eigen::Index j = 0; j < draws.p; ++j)
    if (mask[static_cast<size_t>(j)]) beta_mean[j] = draws.values.col(draws.beta_col(j)).mean();

  double scale_mean = 0.0;
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    const double sigma = std::sqrt(draws.values(i, draws.sigma2_col()));
    const double r = draws.values(i, draws.r_col());
    scale_mean += sigma * (scale == SpatialScale::sqrt_r ? std::sqrt(r) : r);
  }
  scale_mean /= static_cast<double>(draws.rows());

  return new_x * beta_mean + scale_mean * (new_a * w_mean);
}

}  // namespace spatsel
