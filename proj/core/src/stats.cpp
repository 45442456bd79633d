#include "offload/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace offload {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile rank must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::string_view to_string(Metric metric) { return metric == Metric::kMakespan ? "makespan" : "hops"; }

std::vector<SummaryRow> summarize(std::span<const RunResult> runs) {
  struct Pool {
    std::vector<double> makespan;
    std::vector<double> hops;
    long long censored = 0;
  };
  std::map<std::pair<int, double>, Pool> pools;
  for (const RunResult& r : runs) {
    Pool& pool = pools[{static_cast<int>(r.scheme), r.load}];
    for (const Job& j : r.jobs) {
      if (!j.completion_time) {
        ++pool.censored;
        continue;
      }
      pool.makespan.push_back(j.makespan());
      pool.hops.push_back(j.hops);
    }
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, pool] : pools) {
    for (Metric m : {Metric::kMakespan, Metric::kHops}) {
      SummaryRow row;
      row.scheme = static_cast<SchemeKind>(key.first);
      row.load = key.second;
      row.metric = m;
      const auto& v = m == Metric::kMakespan ? pool.makespan : pool.hops;
      row.n_jobs = static_cast<long long>(v.size());
      row.n_censored = pool.censored;
      if (!v.empty()) {
        row.p25 = percentile(v, 0.25);
        row.median = percentile(v, 0.5);
        row.p75 = percentile(v, 0.75);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

LinearFit fit_line(std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  if (y.size() < 3) throw std::invalid_argument("line fit needs at least 3 points");
  const double xbar = (n - 1.0) / 2.0;
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxx += dx * dx;
    sxy += dx * (y[i] - ybar);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * static_cast<double>(i));
    sse += e * e;
  }
  fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

}  // namespace offload
