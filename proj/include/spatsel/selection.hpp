#pragma once

// Post-processing rules turning posterior draws into binary inclusion masks:
// credible-interval exclusion of zero (Cr), posterior shrinkage-weight
// thresholding (HSP), and per-draw two-means clustering of |beta| (S2M).

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatsel/model.hpp"

namespace spatsel {

enum class SelectionMethod { cr, s2m, hsp };

const char* selection_method_name(SelectionMethod m);

struct SelectionResult {
  SelectionMethod method = SelectionMethod::cr;
  std::vector<std::uint8_t> mask;  // p flags
  // Per-coefficient diagnostics. Cr: [lo, hi] credible bounds. HSP: hi holds
  // the posterior mean shrinkage weight (lo unused, 0). S2M: lo holds the final
  // cluster assignment (1 = signal), hi the posterior median |beta|.
  Eigen::VectorXd diag_lo;
  Eigen::VectorXd diag_hi;

  Eigen::Index selected_count() const;
};

struct TwoMeansResult {
  std::vector<std::uint8_t> signal;  // membership in the larger-center cluster
  double center_lo = 0.0;
  double center_hi = 0.0;
};

// Deterministic 2-means over nonnegative values with min/max initialization.
// All-equal input is degenerate and yields an empty signal cluster. b_tuning
// biases the assignment boundary toward the noise cluster (1 = plain 2-means).
TwoMeansResult two_means(const std::vector<double>& values, double b_tuning = 1.0);

SelectionResult select_cr(const PosteriorDraws& draws, double level = 0.95,
                          bool exempt_intercept = false);
SelectionResult select_hsp(const PosteriorDraws& draws, double cutoff = 0.5,
                           bool exempt_intercept = false);
SelectionResult select_s2m(const PosteriorDraws& draws, double b_tuning = 1.0,
                           bool exempt_intercept = false);

// CSV rows: index, name, method, included, diagnostic_lo, diagnostic_hi_or_weight.
void selection_to_csv(const SelectionResult& result, const std::vector<std::string>& names,
                      std::ostream& out);

}  // namespace spatsel
