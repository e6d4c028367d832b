#pragma once

// Loading real censored spatial datasets from CSV, the iterated-log response
// transform, and covariate standardization.

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatsel/dataset.hpp"

namespace spatsel {

struct DatasetSchema {
  std::string site_id = "site_id";
  std::string x = "x";
  std::string y = "y";
  std::string response = "response";
  std::string censored = "censored";
  std::string limit = "limit";
  // Explicit covariate column list; empty means every remaining column.
  std::vector<std::string> covariates;
};

struct LoadReport {
  Eigen::Index rows_in = 0;
  Eigen::Index kept = 0;
  Eigen::Index dropped_missing_covariate = 0;
  Eigen::Index dropped_missing_response = 0;  // response and limit unusable
  Eigen::Index dropped_missing_coords = 0;
  double censored_pct = 0.0;
};

// Loads sites and measurements, joined on site_id when two files are given
// (pass the same path, or an empty sites_path, for a single-file layout).
// Adds the all-ones intercept as the first design column.
SpatialDataset load_dataset(const std::string& sites_path, const std::string& data_path,
                            const DatasetSchema& schema, LoadReport* report = nullptr);

// g(y) = log(1 + log(1 + y)); applied to responses and detection limits alike
// so the censoring order is preserved.
double transform_response(double y);
void apply_response_transform(SpatialDataset& data);

struct Standardization {
  Eigen::VectorXd means;
  Eigen::VectorXd sds;
};

// Centers and scales every non-intercept column to unit sample SD in place.
Standardization standardize_covariates(Eigen::MatrixXd& X, bool has_intercept);
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& st,
                                      bool has_intercept);

// Round-trippable export in the documented CSV schema.
void export_dataset(const SpatialDataset& data, std::ostream& out);

}  // namespace spatsel
