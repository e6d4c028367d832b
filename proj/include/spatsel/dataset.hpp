#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spatsel/mesh.hpp"

namespace spatsel {

// The observed world: sites, covariates, responses, censoring flags, limits.
// Where censored(i) is set the stored y(i) is ignored by the likelihood;
// only limits(i) matters there.
struct SpatialDataset {
  Points sites;                    // n x 2
  Eigen::MatrixXd X;               // n x p
  Eigen::VectorXd y;               // n, transformed response units
  std::vector<std::uint8_t> censored;  // n flags
  Eigen::VectorXd limits;          // detection limit where censored
  std::vector<std::string> covariate_names;  // p entries
  bool has_intercept = false;      // data-analysis mode: first column all ones

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  Eigen::Index n_censored() const;

  // Dimension/finiteness checks plus the no-constant-column rule
  // (the intercept, when present, is the only constant column allowed).
  void validate() const;
};

}  // namespace spatsel
