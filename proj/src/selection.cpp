#include "spatsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "spatsel/errors.hpp"
#include "spatsel/stats.hpp"

namespace spatsel {

const char* selection_method_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::cr: return "Cr";
    case SelectionMethod::s2m: return "2means";
    case SelectionMethod::hsp: return "HSP";
  }
  return "?";
}

Eigen::Index SelectionResult::selected_count() const {
  Eigen::Index k = 0;
  for (const auto b : mask) k += (b != 0);
  return k;
}

TwoMeansResult two_means(const std::vector<double>& values, double b_tuning) {
  if (values.size() < 2) throw data_error("two_means: need at least 2 values");
  if (!(b_tuning > 0.0)) throw data_error("two_means: b_tuning must be > 0");

  TwoMeansResult out;
  out.signal.assign(values.size(), 0);
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  out.center_lo = lo;
  out.center_hi = hi;
  if (!(hi > lo)) return out;  // degenerate: everything in the noise cluster

  for (int iter = 0; iter < 100; ++iter) {
    double sum_lo = 0.0, sum_hi = 0.0;
    int n_lo = 0, n_hi = 0;
    for (size_t i = 0; i < values.size(); ++i) {
      const bool to_hi = b_tuning * std::abs(values[i] - hi) < std::abs(values[i] - lo);
      out.signal[i] = to_hi ? 1 : 0;
      if (to_hi) {
        sum_hi += values[i];
        ++n_hi;
      } else {
        sum_lo += values[i];
        ++n_lo;
      }
    }
    const double new_lo = n_lo ? sum_lo / n_lo : lo;
    const double new_hi = n_hi ? sum_hi / n_hi : hi;
    const double shift = std::abs(new_lo - lo) + std::abs(new_hi - hi);
    lo = new_lo;
    hi = new_hi;
    if (shift < 1e-10) break;
  }
  if (lo > hi) {
    std::swap(lo, hi);
    for (auto& s : out.signal) s = !s;
  }
  out.center_lo = lo;
  out.center_hi = hi;
  if (!(hi > lo)) std::fill(out.signal.begin(), out.signal.end(), 0);
  return out;
}

namespace {

void apply_intercept_exemption(SelectionResult& result, bool exempt) {
  if (exempt && !result.mask.empty()) result.mask[0] = 1;
}

}  // namespace

SelectionResult select_cr(const PosteriorDraws& draws, double level, bool exempt_intercept) {
  if (draws.rows() < 2) throw data_error("select_cr: need at least 2 stored draws");
  if (!(level > 0.0 && level < 1.0)) throw data_error("select_cr: level outside (0,1)");
  const double half = 0.5 * (1.0 - level);

  SelectionResult result;
  result.method = SelectionMethod::cr;
  result.mask.assign(static_cast<size_t>(draws.p), 0);
  result.diag_lo.resize(draws.p);
  result.diag_hi.resize(draws.p);
  for (Eigen::Index j = 0; j < draws.p; ++j) {
    const Eigen::VectorXd col = draws.values.col(draws.beta_col(j));
    const double lo = quantile_type7(col, half);
    const double hi = quantile_type7(col, 1.0 - half);
    result.diag_lo[j] = lo;
    result.diag_hi[j] = hi;
    result.mask[static_cast<size_t>(j)] = (lo > 0.0 || hi < 0.0) ? 1 : 0;
  }
  apply_intercept_exemption(result, exempt_intercept);
  return result;
}

SelectionResult select_hsp(const PosteriorDraws& draws, double cutoff, bool exempt_intercept) {
  if (draws.rows() < 1) throw data_error("select_hsp: empty draws");
  if (draws.values.cols() != 2 * draws.p + 4)
    throw data_error("select_hsp: draws lack the lambda/tau columns");

  SelectionResult result;
  result.method = SelectionMethod::hsp;
  result.mask.assign(static_cast<size_t>(draws.p), 0);
  result.diag_lo = Eigen::VectorXd::Zero(draws.p);
  result.diag_hi.resize(draws.p);
  for (Eigen::Index j = 0; j < draws.p; ++j) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < draws.rows(); ++t) {
      const double lam = draws.values(t, draws.lambda_col(j));
      const double tau = draws.values(t, draws.tau_col());
      acc += 1.0 / (1.0 + lam * lam * tau * tau);
    }
    const double weight = acc / static_cast<double>(draws.rows());
    result.diag_hi[j] = weight;
    result.mask[static_cast<size_t>(j)] = weight < cutoff ? 1 : 0;  // strict, per the rule
  }
  apply_intercept_exemption(result, exempt_intercept);
  return result;
}

SelectionResult select_s2m(const PosteriorDraws& draws, double b_tuning, bool exempt_intercept) {
  if (draws.rows() < 2) throw data_error("select_s2m: need at least 2 stored draws");
  if (draws.p < 2) throw data_error("select_s2m: need at least 2 coefficients");

  // (a) per-draw signal counts from two-means on |beta|
  std::map<Eigen::Index, Eigen::Index> counts;
  std::vector<double> abs_draw(static_cast<size_t>(draws.p));
  for (Eigen::Index t = 0; t < draws.rows(); ++t) {
    for (Eigen::Index j = 0; j < draws.p; ++j)
      abs_draw[static_cast<size_t>(j)] = std::abs(draws.values(t, draws.beta_col(j)));
    const TwoMeansResult tm = two_means(abs_draw, b_tuning);
    Eigen::Index h = 0;
    for (const auto s : tm.signal) h += (s != 0);
    counts[h] += 1;
  }
  // (b) modal count, smallest mode on ties (map iteration is ascending)
  Eigen::Index h_star = 0, best = 0;
  for (const auto& [h, c] : counts)
    if (c > best) {
      best = c;
      h_star = h;
    }

  // (c) the h_star coefficients with largest posterior median |beta|
  Eigen::VectorXd med(draws.p);
  for (Eigen::Index j = 0; j < draws.p; ++j)
    med[j] = quantile_type7(draws.values.col(draws.beta_col(j)).cwiseAbs(), 0.5);
  std::vector<Eigen::Index> order(static_cast<size_t>(draws.p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return med[a] > med[b]; });

  SelectionResult result;
  result.method = SelectionMethod::s2m;
  result.mask.assign(static_cast<size_t>(draws.p), 0);
  result.diag_lo = Eigen::VectorXd::Zero(draws.p);
  result.diag_hi = med;
  for (Eigen::Index k = 0; k < h_star; ++k) {
    result.mask[static_cast<size_t>(order[static_cast<size_t>(k)])] = 1;
    result.diag_lo[order[static_cast<size_t>(k)]] = 1.0;
  }
  apply_intercept_exemption(result, exempt_intercept);
  return result;
}

void selection_to_csv(const SelectionResult& result, const std::vector<std::string>& names,
                      std::ostream& out) {
  out << "index,name,method,included,diagnostic_lo,diagnostic_hi_or_weight\n";
  out.precision(10);
  for (size_t j = 0; j < result.mask.size(); ++j) {
    const std::string name = j < names.size() ? names[j] : "x" + std::to_string(j + 1);
    out << (j + 1) << "," << name << "," << selection_method_name(result.method) << ","
        << int(result.mask[j]) << "," << result.diag_lo[static_cast<Eigen::Index>(j)] << ","
        << result.diag_hi[static_cast<Eigen::Index>(j)] << "\n";
  }
}

}  // namespace spatsel
