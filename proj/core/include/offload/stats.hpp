#pragma once

// Summary statistics over job records.

#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "offload/engine.hpp"

namespace offload {

/// Linear interpolation between closest ranks (q in [0, 1]). Sorts a copy.
/// Throws std::invalid_argument on empty input.
double percentile(std::vector<double> values, double q);

enum class Metric { kMakespan, kHops };

std::string_view to_string(Metric metric);

struct SummaryRow {
  SchemeKind scheme = SchemeKind::kJointSpbp;
  double load = 0.0;
  Metric metric = Metric::kMakespan;
  // Unset when no job completed, e.g. an infeasible joint_lp cell.
  std::optional<double> p25;
  std::optional<double> median;
  std::optional<double> p75;
  long long n_jobs = 0;  // completed
  long long n_censored = 0;

  bool operator==(const SummaryRow&) const = default;
};

/// Pools all completed jobs of every run sharing (scheme, load); censored
/// jobs only enter the counter. Rows sorted by (scheme, load, metric).
std::vector<SummaryRow> summarize(std::span<const RunResult> runs);

/// Least-squares slope of y against 0, 1, 2, ...
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LinearFit fit_line(std::span<const double> y);

}  // namespace offload
