#include "spatsel/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "spatsel/csv.hpp"
#include "spatsel/errors.hpp"

namespace spatsel {

double transform_response(double y) {
  if (std::isnan(y)) return y;
  if (y < 0.0) throw data_error("transform_response: negative concentration");
  return std::log1p(std::log1p(y));
}

void apply_response_transform(SpatialDataset& data) {
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!std::isnan(data.y[i])) data.y[i] = transform_response(data.y[i]);
    if (!std::isnan(data.limits[i])) data.limits[i] = transform_response(data.limits[i]);
  }
}

SpatialDataset load_dataset(const std::string& sites_path, const std::string& data_path,
                            const DatasetSchema& schema, LoadReport* report) {
  const CsvTable data_table = read_csv_file(data_path);
  const bool single_file = sites_path.empty() || sites_path == data_path;
  const CsvTable sites_table = single_file ? data_table : read_csv_file(sites_path);

  const auto require = [](const CsvTable& t, const std::string& name, const std::string& where) {
    const int c = t.col(name);
    if (c < 0) throw data_error("load_dataset: missing column '" + name + "' in " + where);
    return c;
  };

  const int cx = require(sites_table, schema.x, "sites file");
  const int cy = require(sites_table, schema.y, "sites file");
  const int cresp = require(data_table, schema.response, "data file");
  const int ccens = require(data_table, schema.censored, "data file");
  const int climit = require(data_table, schema.limit, "data file");

  // map data rows to coordinates
  std::map<std::string, std::pair<double, double>> site_xy;
  int c_id_sites = -1, c_id_data = -1;
  if (!single_file) {
    c_id_sites = require(sites_table, schema.site_id, "sites file");
    c_id_data = require(data_table, schema.site_id, "data file");
    for (size_t i = 0; i < sites_table.n_rows(); ++i) {
      const auto& row = sites_table.rows[i];
      site_xy[row[static_cast<size_t>(c_id_sites)]] = {
          parse_numeric_cell(row[static_cast<size_t>(cx)], i + 2, schema.x),
          parse_numeric_cell(row[static_cast<size_t>(cy)], i + 2, schema.y)};
    }
  }

  // covariates: explicit list, or every column not claimed by the schema
  std::vector<int> cov_cols;
  std::vector<std::string> cov_names;
  if (!schema.covariates.empty()) {
    for (const auto& name : schema.covariates) cov_cols.push_back(require(data_table, name, "data file"));
    cov_names = schema.covariates;
  } else {
    const std::set<std::string> claimed = {schema.site_id, schema.x, schema.y,
                                           schema.response, schema.censored, schema.limit};
    for (size_t j = 0; j < data_table.columns.size(); ++j)
      if (!claimed.count(data_table.columns[j])) {
        cov_cols.push_back(static_cast<int>(j));
        cov_names.push_back(data_table.columns[j]);
      }
  }

  LoadReport rep;
  rep.rows_in = static_cast<Eigen::Index>(data_table.n_rows());

  std::vector<double> xs, ys, resps, limits;
  std::vector<std::uint8_t> cens;
  std::vector<std::vector<double>> covs;
  Eigen::Index n_censored = 0;

  for (size_t i = 0; i < data_table.n_rows(); ++i) {
    const auto& row = data_table.rows[i];
    const size_t file_row = i + 2;

    double sx, sy;
    if (single_file) {
      sx = parse_numeric_cell(row[static_cast<size_t>(cx)], file_row, schema.x);
      sy = parse_numeric_cell(row[static_cast<size_t>(cy)], file_row, schema.y);
    } else {
      const auto it = site_xy.find(row[static_cast<size_t>(c_id_data)]);
      if (it == site_xy.end()) {
        ++rep.dropped_missing_coords;
        continue;
      }
      sx = it->second.first;
      sy = it->second.second;
    }
    if (std::isnan(sx) || std::isnan(sy)) {
      ++rep.dropped_missing_coords;
      continue;
    }

    std::vector<double> cov_row(cov_cols.size());
    bool missing_cov = false;
    for (size_t k = 0; k < cov_cols.size(); ++k) {
      cov_row[k] =
          parse_numeric_cell(row[static_cast<size_t>(cov_cols[k])], file_row, cov_names[k]);
      if (std::isnan(cov_row[k])) missing_cov = true;
    }
    if (missing_cov) {
      ++rep.dropped_missing_covariate;
      continue;
    }

    const double cflag_raw =
        parse_numeric_cell(row[static_cast<size_t>(ccens)], file_row, schema.censored);
    const bool is_cens = !std::isnan(cflag_raw) && cflag_raw != 0.0;
    const double resp = parse_numeric_cell(row[static_cast<size_t>(cresp)], file_row, schema.response);
    const double limit = parse_numeric_cell(row[static_cast<size_t>(climit)], file_row, schema.limit);
    // a censored row needs a limit, an uncensored row needs a response
    if ((is_cens && std::isnan(limit)) || (!is_cens && std::isnan(resp))) {
      ++rep.dropped_missing_response;
      continue;
    }

    xs.push_back(sx);
    ys.push_back(sy);
    resps.push_back(std::isnan(resp) ? limit : resp);
    limits.push_back(limit);
    cens.push_back(is_cens ? 1 : 0);
    covs.push_back(std::move(cov_row));
    n_censored += is_cens;
  }

  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  if (n < 1) throw data_error("load_dataset: no usable rows");
  rep.kept = n;
  rep.censored_pct = 100.0 * static_cast<double>(n_censored) / static_cast<double>(n);

  SpatialDataset out;
  out.sites.resize(n, 2);
  out.y.resize(n);
  out.limits.resize(n);
  out.censored = std::move(cens);
  out.X.resize(n, static_cast<Eigen::Index>(cov_cols.size()) + 1);
  out.X.col(0).setOnes();
  out.has_intercept = true;
  out.covariate_names.clear();
  out.covariate_names.push_back("intercept");
  for (const auto& name : cov_names) out.covariate_names.push_back(name);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.sites(i, 0) = xs[static_cast<size_t>(i)];
    out.sites(i, 1) = ys[static_cast<size_t>(i)];
    out.y[i] = resps[static_cast<size_t>(i)];
    out.limits[i] = limits[static_cast<size_t>(i)];
    for (size_t k = 0; k < cov_cols.size(); ++k)
      out.X(i, static_cast<Eigen::Index>(k) + 1) = covs[static_cast<size_t>(i)][k];
  }
  if (report) *report = rep;
  return out;
}

Standardization standardize_covariates(Eigen::MatrixXd& X, bool has_intercept) {
  const Eigen::Index p = X.cols();
  Standardization st;
  st.means = Eigen::VectorXd::Zero(p);
  st.sds = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = has_intercept ? 1 : 0; j < p; ++j) {
    const double m = X.col(j).mean();
    const double sd =
        std::sqrt((X.col(j).array() - m).square().sum() / (static_cast<double>(X.rows()) - 1.0));
    if (!(sd > 0.0)) {
      std::ostringstream msg;
      msg << "standardize_covariates: column " << j << " has zero variance";
      throw data_error(msg.str());
    }
    st.means[j] = m;
    st.sds[j] = sd;
    X.col(j) = (X.col(j).array() - m) / sd;
  }
  return st;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& st,
                                      bool has_intercept) {
  Eigen::MatrixXd out = X;
  for (Eigen::Index j = has_intercept ? 1 : 0; j < X.cols(); ++j)
    out.col(j) = (X.col(j).array() - st.means[j]) / st.sds[j];
  return out;
}

void export_dataset(const SpatialDataset& data, std::ostream& out) {
  out << "site_id,x,y,response,censored,limit";
  const Eigen::Index first_cov = data.has_intercept ? 1 : 0;
  for (Eigen::Index j = first_cov; j < data.p(); ++j) {
    const auto& name = data.covariate_names[static_cast<size_t>(j)];
    out << "," << name;
  }
  out << "\n";
  char buf[40];
  const auto put = [&](double v) {
    if (std::isnan(v)) return;
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << (i + 1) << ",";
    put(data.sites(i, 0));
    out << ",";
    put(data.sites(i, 1));
    out << ",";
    put(data.y[i]);
    out << "," << int(data.censored[static_cast<size_t>(i)]) << ",";
    put(data.limits[i]);
    for (Eigen::Index j = first_cov; j < data.p(); ++j) {
      out << ",";
      put(data.X(i, j));
    }
    out << "\n";
  }
}

}  // namespace spatsel
