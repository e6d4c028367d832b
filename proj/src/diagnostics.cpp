#include "spatsel/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "spatsel/stats.hpp"

namespace spatsel {

double effective_sample_size(const Eigen::Ref<const Eigen::VectorXd>& chain) {
  const Eigen::Index n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = chain.mean();
  const Eigen::VectorXd c = chain.array() - mean;
  const double gamma0 = c.squaredNorm() / static_cast<double>(n);
  if (!(gamma0 > 0.0)) return static_cast<double>(n);

  const auto gamma = [&](Eigen::Index k) {
    return c.head(n - k).dot(c.tail(n - k)) / static_cast<double>(n);
  };

  // sum of autocovariances over initial positive pairs (Geyer)
  double acc = 0.0;
  for (Eigen::Index k = 1; k + 1 < n; k += 2) {
    const double pair = gamma(k) + gamma(k + 1);
    if (pair <= 0.0) break;
    acc += pair;
  }
  const double tau = 1.0 + 2.0 * acc / gamma0;
  return static_cast<double>(n) / std::max(1.0, tau);
}

std::vector<TraceSummary> trace_summary(const PosteriorDraws& draws) {
  const auto names = draws.column_names();
  std::vector<TraceSummary> out;
  out.reserve(names.size());
  for (Eigen::Index j = 0; j < draws.values.cols(); ++j) {
    TraceSummary s;
    s.name = names[static_cast<size_t>(j)];
    s.mean = sample_mean(draws.values.col(j));
    s.sd = sample_sd(draws.values.col(j));
    s.ess = effective_sample_size(draws.values.col(j));
    out.push_back(std::move(s));
  }
  return out;
}

void write_trace_summary(const std::vector<TraceSummary>& summary, std::ostream& out) {
  out << "parameter,mean,sd,ess\n";
  char buf[40];
  for (const auto& s : summary) {
    out << s.name << ",";
    std::snprintf(buf, sizeof buf, "%.10g", s.mean);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.10g", s.sd);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.6g", s.ess);
    out << buf << "\n";
  }
}

}  // namespace spatsel
