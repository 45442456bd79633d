#pragma once

// Experiment harness behind the offsim command line: instance generation,
// single runs and load sweeps with per-cell result files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "offload/engine.hpp"
#include "offload/serialize.hpp"
#include "offload/stats.hpp"

namespace offload {

namespace fs = std::filesystem;

enum class Scenario { kTwoType, kSingleType };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);
ServiceScheme service_scheme(Scenario s);

/// Bad user input (flags, config keys, scheme/instance mismatch).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
  std::uint64_t master_seed = 1;
  int n_networks = 10;
  int n_traffic_instances = 1;
  std::vector<double> loads{0.5, 1.0, 1.5, 2.0};
  std::vector<SchemeKind> schemes{SchemeKind::kJointSpbp, SchemeKind::kSpbpSpbp, SchemeKind::kBpSpbp};
  Scenario scenario = Scenario::kTwoType;
  fs::path output_dir = "out";

  int horizon = 1000;
  int processors = 4;
  GenParams topology;
  Interval link_rate{10.0, 20.0};
  TrafficParams traffic;
  FadingParams fading;

  /// Throws UsageError.
  void validate() const;
};

/// JSON config with keys mirroring ExperimentSpec; missing keys keep their
/// defaults, unknown keys are rejected.
ExperimentSpec read_spec(std::istream& in);
void write_spec(std::ostream& out, const ExperimentSpec& spec);

/// Network `net` of the experiment, link rates included.
Topology make_network(const ExperimentSpec& spec, int net);
/// Traffic instance `inst` on network `net`, tasks stored at unit load.
Instance make_instance(const ExperimentSpec& spec, int net, int inst);
/// Simulation seed shared by every scheme and load of one instance.
std::uint64_t cell_seed(const ExperimentSpec& spec, int net, int inst);

Instance load_instance(const fs::path& topology, const fs::path& tasks);

struct GeneratedFiles {
  std::vector<fs::path> topologies;
  std::vector<fs::path> tasks;
  fs::path manifest;
};

GeneratedFiles cmd_generate(const ExperimentSpec& spec);

struct RunOptions {
  SchemeKind scheme = SchemeKind::kJointSpbp;
  double load = 1.0;
  std::uint64_t seed = 1;
  int horizon = 1000;
  int processors = 4;
  FadingParams fading;
};

/// Throws UsageError for joint_lp on a multi-type instance. An infeasible
/// LP comes back as RunResult::lp_infeasible.
RunResult cmd_run(const Instance& instance, const RunOptions& options);

struct SweepReport {
  std::size_t cells = 0;
  std::size_t reused = 0;  // cell files already present
  std::size_t infeasible = 0;
  fs::path results;
  fs::path summary;
};

/// Runs every (network, instance, scheme, load) cell. Each cell is written
/// to output_dir/cells on completion and skipped on rerun, so an interrupted
/// sweep can be resumed. The merged files do not depend on `threads`.
SweepReport cmd_sweep(const ExperimentSpec& spec, int threads);

/// Summary over a sweep's cell directory, infeasible cells included.
std::vector<SummaryRow> summarize_cells(const fs::path& cells_dir);

}  // namespace offload
