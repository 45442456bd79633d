#pragma once

// Task specifications, job records, and Poisson job arrivals.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "offload/netgraph.hpp"
#include "offload/rng.hpp"
#include "offload/types.hpp"

namespace offload {

/// Inclusive slot window of a bursty task.
struct BurstWindow {
  int start = 0;
  int end = 0;

  bool operator==(const BurstWindow&) const = default;
};

struct TaskSpec {
  NodeId source = kNoNode;
  TypeId type = 0;
  double rate = 0.0;  // lambda, jobs/slot
  std::optional<BurstWindow> burst;  // empty: streaming

  bool streaming() const { return !burst.has_value(); }
  bool active(int slot) const { return !burst || (slot >= burst->start && slot <= burst->end); }

  bool operator==(const TaskSpec&) const = default;
};

struct TrafficParams {
  Interval client_fraction{0.3, 1.0};  // p
  Interval base_rate{0.5, 1.0};        // lambda tilde
  double bursty_prob = 0.5;
  int burst_length = 30;
  int burst_margin = 200;  // burst start drawn from U{0, horizon - margin}
  int horizon = 1000;
  bool allow_bursty = true;
};

/// Number of clients hosting a task: p * |M| rounded half-to-even.
int task_count(double fraction, std::size_t num_clients);

/// Tasks ordered by (type, source). Throws std::invalid_argument when load <= 0.
std::vector<TaskSpec> generate_tasks(std::uint64_t seed, const Topology& topo, int num_types,
                                     double load, const TrafficParams& params);

/// Poisson(rate) when the slot is inside the task's active window, else 0.
int sample_arrivals(const TaskSpec& task, int slot, Rng& rng);

/// Arrival stream of one task, seeded by (seed, type, source).
class ArrivalStream {
 public:
  ArrivalStream(std::uint64_t seed, const TaskSpec& task);

  int sample(int slot) { return sample_arrivals(task_, slot, rng_); }
  const TaskSpec& task() const { return task_; }

 private:
  TaskSpec task_;
  Rng rng_;
};

struct Job {
  JobId id = -1;
  TypeId type = 0;
  NodeId source = kNoNode;
  int arrival_slot = 0;
  std::optional<double> completion_time;
  int hops = 0;
  NodeId processed_at = kNoNode;
  NodeId destination = kNoNode;  // fixed destination under separated schemes
  double fetch_time = -1.0;

  double makespan() const { return completion_time.value_or(0.0) - arrival_slot; }
};

}  // namespace offload
