#include "spatsel/dataset.hpp"

#include <cmath>
#include <sstream>

#include "spatsel/errors.hpp"

namespace spatsel {

Eigen::Index SpatialDataset::n_censored() const {
  Eigen::Index k = 0;
  for (const auto c : censored) k += (c != 0);
  return k;
}

void SpatialDataset::validate() const {
  const Eigen::Index nn = n(), pp = p();
  if (nn < 1 || pp < 1) throw data_error("dataset: need n >= 1 and p >= 1");
  if (sites.rows() != nn || y.size() != nn || limits.size() != nn ||
      static_cast<Eigen::Index>(censored.size()) != nn)
    throw data_error("dataset: inconsistent dimensions");
  if (!covariate_names.empty() && static_cast<Eigen::Index>(covariate_names.size()) != pp)
    throw data_error("dataset: covariate_names length mismatch");
  if (!X.allFinite()) throw data_error("dataset: covariates contain non-finite values");
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (censored[static_cast<size_t>(i)]) {
      if (!std::isfinite(limits[i])) throw data_error("dataset: censored row without finite limit");
    } else if (!std::isfinite(y[i])) {
      throw data_error("dataset: uncensored row without finite response");
    }
  }
  for (Eigen::Index j = has_intercept ? 1 : 0; j < pp; ++j) {
    if (X.col(j).maxCoeff() == X.col(j).minCoeff()) {
      std::ostringstream msg;
      msg << "dataset: column " << j << " is constant";
      throw data_error(msg.str());
    }
  }
}

}  // namespace spatsel
