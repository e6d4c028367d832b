#pragma once

// Trace diagnostics: effective sample size (Geyer initial positive sequence)
// and per-parameter posterior summaries.

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatsel/model.hpp"

namespace spatsel {

double effective_sample_size(const Eigen::Ref<const Eigen::VectorXd>& chain);

struct TraceSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
};

std::vector<TraceSummary> trace_summary(const PosteriorDraws& draws);
void write_trace_summary(const std::vector<TraceSummary>& summary, std::ostream& out);

}  // namespace spatsel
