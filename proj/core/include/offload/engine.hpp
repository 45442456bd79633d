#pragma once

// Time-slotted simulation loop.
//
// Each slot t runs, in order:
//   1. transfers from slot t-1 are already in the receivers' queues; new
//      arrivals are injected at their sources (separated schemes fix the
//      destination here, joint_lp samples the first action);
//   2. every computing node advances its processors through [t, t+1);
//   3. the routing queues are snapshotted;
//   4. the active scheme decides and executes wireless transfers, moving
//      min(quota, backlog) jobs per scheduled link. Receivers see them at t+1.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "offload/baselines.hpp"
#include "offload/compute.hpp"
#include "offload/extended.hpp"
#include "offload/lp.hpp"
#include "offload/netgraph.hpp"
#include "offload/queueing.hpp"
#include "offload/spbp.hpp"
#include "offload/traffic.hpp"

namespace offload {

enum class SchemeKind { kJointSpbp, kSpbpSpbp, kBpSpbp, kJointLp };

std::string_view to_string(SchemeKind scheme);
SchemeKind parse_scheme(std::string_view name);

struct FadingParams {
  double sd = 0.2;  // of the mean-one fading factor
  double lo = 0.5;
  double hi = 1.5;
};

/// R_e,t = max(1, round(r_e * F_e,t)) with F_e,t drawn i.i.d. from a
/// truncated normal(1, sd) on [lo, hi]. Slot t uses its own stream, so rates
/// are drawn at slot t and never depend on other slots.
std::vector<int> realize_link_rates(std::uint64_t seed, int slot, const Topology& topo,
                                    const FadingParams& fading);

/// A network plus its traffic. Task rates are stored at `task_load` and
/// rescaled to the simulated load.
struct Instance {
  Topology topology;
  ServiceRates mu;
  int num_types = 1;
  std::vector<TaskSpec> tasks;
  double task_load = 1.0;
};

struct SimConfig {
  int horizon = 1000;
  SchemeKind scheme = SchemeKind::kJointSpbp;
  double load = 1.0;
  std::uint64_t seed = 1;
  int processors = 4;
  FadingParams fading;

  void validate() const;
};

class LpInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlotCounters {
  long long created = 0;
  long long completed = 0;
  long long queued = 0;
  long long processing = 0;
};

struct RunResult {
  SchemeKind scheme = SchemeKind::kJointSpbp;
  double load = 0.0;
  std::uint64_t seed = 0;
  bool lp_infeasible = false;
  std::vector<Job> jobs;  // every created job, by id; completion unset = censored
  std::vector<long long> backlog;  // queued jobs at the end of each slot
  long long completed = 0;
  long long censored = 0;
};

class Simulator {
 public:
  /// Throws LpInfeasibleError for joint_lp when the static LP has no solution.
  Simulator(Instance instance, SimConfig config);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  void step();
  int slot() const;
  bool done() const;
  SlotCounters counters() const;
  const std::vector<Job>& jobs() const;
  const std::vector<long long>& backlog() const;

  /// Optional CSV sinks: per-slot transfers and per-job completions.
  void set_schedule_trace(std::ostream* out);
  void set_completion_log(std::ostream* out);

  /// Runs any remaining slots and returns the records.
  RunResult finish();

 private:
  struct State;
  std::unique_ptr<State> s_;
};

RunResult run(const Instance& instance, const SimConfig& config);

}  // namespace offload
