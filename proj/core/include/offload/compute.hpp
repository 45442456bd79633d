#pragma once

// Multi-processor job execution at computing nodes.
//
// Processors run in continuous time, independently of the slotted routing
// loop. Whenever one becomes free at time tau it fetches the head job of the
// type maximizing Q_i^(c)(tau) / mu_i^c, which emulates MaxWeight on the
// node's virtual links. A type-c job holds a processor for P / mu_i^c slots,
// so P busy processors deliver mu_i^c jobs/slot in aggregate.

#include <optional>
#include <span>
#include <vector>

#include "offload/queueing.hpp"
#include "offload/types.hpp"

namespace offload {

/// Eligible types have mu > 0 and a non-empty queue; ties go to the lowest type.
std::optional<TypeId> pick_commodity(std::span<const int> backlog, std::span<const double> mu);

struct Completion {
  JobId job;
  TypeId type;
  NodeId node;
  double fetch_time;
  double finish_time;
};

class ComputeNode {
 public:
  /// `mu` holds this node's service rate per type.
  ComputeNode(NodeId id, int processors, std::vector<double> mu);

  NodeId id() const { return id_; }
  int processors() const { return static_cast<int>(slots_.size()); }
  int busy() const;
  double duration(TypeId type) const { return processors() / mu_[static_cast<std::size_t>(type)]; }

  /// Advances the node over [now, horizon), fetching live from `queues`
  /// (commodity = task type) and appending completions in finish order.
  void step(double now, double horizon, QueueBank& queues, std::vector<Completion>& completed);

 private:
  struct Slot {
    bool busy = false;
    JobId job = -1;
    TypeId type = 0;
    double fetch_time = 0.0;
    double finish_time = 0.0;
  };

  bool fetch(Slot& slot, double at, QueueBank& queues);

  NodeId id_;
  std::vector<double> mu_;
  std::vector<Slot> slots_;
  std::vector<int> backlog_;  // scratch
};

}  // namespace offload
