#include "spatsel/model.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "spatsel/errors.hpp"

namespace spatsel {

void ModelConfig::validate() const {
  if (iterations < 1 || thinning < 1 || burn_in < 0) throw config_error("config: bad chain lengths");
  if (iterations <= burn_in * thinning)
    throw config_error("config: iterations must exceed burn_in * thinning");
  if (!(mh_step_rho > 0.0) || !(mh_step_r > 0.0))
    throw config_error("config: MH step sizes must be > 0");
  if (!(a_sigma > 0.0) || !(b_sigma > 0.0)) throw config_error("config: sigma prior must be > 0");
}

std::vector<std::string> PosteriorDraws::column_names() const {
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(2 * p + 4));
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("beta_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("lambda_" + std::to_string(j + 1));
  names.emplace_back("tau");
  names.emplace_back("sigma2");
  names.emplace_back("r");
  names.emplace_back("rho");
  return names;
}

void PosteriorDraws::to_csv(std::ostream& out) const {
  const auto names = column_names();
  for (size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

PosteriorDraws PosteriorDraws::from_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw data_error("draws: empty file");
  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.front() == ' ')) cell.erase(cell.begin());
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.pop_back();
      names.push_back(cell);
    }
  }
  Eigen::Index p = 0;
  while (p < static_cast<Eigen::Index>(names.size()) &&
         names[static_cast<size_t>(p)] == "beta_" + std::to_string(p + 1))
    ++p;
  const Eigen::Index expected = 2 * p + 4;
  if (p == 0 || static_cast<Eigen::Index>(names.size()) != expected)
    throw data_error("draws: header does not match beta_*/lambda_*/tau/sigma2/r/rho layout");
  for (Eigen::Index j = 0; j < p; ++j)
    if (names[static_cast<size_t>(p + j)] != "lambda_" + std::to_string(j + 1))
      throw data_error("draws: header does not match beta_*/lambda_*/tau/sigma2/r/rho layout");
  if (names[static_cast<size_t>(2 * p)] != "tau" || names[static_cast<size_t>(2 * p + 1)] != "sigma2" ||
      names[static_cast<size_t>(2 * p + 2)] != "r" || names[static_cast<size_t>(2 * p + 3)] != "rho")
    throw data_error("draws: header does not match beta_*/lambda_*/tau/sigma2/r/rho layout");

  std::vector<double> flat;
  std::string line;
  Eigen::Index nrows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index ncell = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        flat.push_back(std::stod(cell));
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "draws: non-numeric cell at row " << (nrows + 2) << ", column " << (ncell + 1);
        throw data_error(msg.str());
      }
      ++ncell;
    }
    if (ncell != expected) {
      std::ostringstream msg;
      msg << "draws: row " << (nrows + 2) << " has " << ncell << " cells, expected " << expected;
      throw data_error(msg.str());
    }
    ++nrows;
  }

  PosteriorDraws draws;
  draws.p = p;
  draws.values.resize(nrows, expected);
  for (Eigen::Index i = 0; i < nrows; ++i)
    for (Eigen::Index j = 0; j < expected; ++j)
      draws.values(i, j) = flat[static_cast<size_t>(i * expected + j)];
  return draws;
}

}  // namespace spatsel
