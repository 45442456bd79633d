#pragma once

// File formats: topology and task JSON, result/summary CSV, LP dumps.

#include <iosfwd>
#include <string>
#include <vector>

#include "offload/engine.hpp"
#include "offload/lp.hpp"
#include "offload/stats.hpp"

namespace offload {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nodes and links. When `eg` is given a "derived" section lists the sinks
/// and virtual links; readers ignore it.
void write_topology(std::ostream& out, const Topology& topo, const ExtendedGraph* eg = nullptr);
Topology read_topology(std::istream& in);

struct TaskFile {
  std::string scenario;
  int num_types = 1;
  double task_load = 1.0;
  std::vector<TaskSpec> tasks;

  bool operator==(const TaskFile&) const = default;
};

void write_tasks(std::ostream& out, const TaskFile& file);
TaskFile read_tasks(std::istream& in);

inline constexpr const char* kResultsHeader =
    "seed,scheme,load,job_id,task_type,source,arrival_slot,completion_time,hops,processed_at,censored";
inline constexpr const char* kSummaryHeader = "scheme,load,metric,p25,median,p75,n_jobs,n_censored";

/// One row per job. Censored jobs leave completion_time and processed_at empty.
void write_results(std::ostream& out, const RunResult& result, bool header = true);
/// Rows grouped into one RunResult per consecutive (seed, scheme, load) key.
std::vector<RunResult> read_results(std::istream& in);

void write_summary(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary(std::istream& in);

/// Total queued jobs per slot.
void write_backlog(std::ostream& out, std::span<const long long> backlog);

void write_lp(std::ostream& out, const FlowProblem& p, const FlowSolution& s);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace offload
