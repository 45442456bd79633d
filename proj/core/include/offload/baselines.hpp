#pragma once

// Benchmark schemes:
//   spbp_spbp  offload at creation to argmin_{i in S + {m}} B_m^(i) + B_i^(c) + Q_i^(c),
//              then SP-BP route to that fixed destination;
//   bp_spbp    same, with the offloading biases set to zero;
//   joint_lp   per-hop random actions with odds proportional to the static
//              LP optimum's flow rates.

#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "offload/extended.hpp"
#include "offload/lp.hpp"
#include "offload/netgraph.hpp"
#include "offload/queueing.hpp"
#include "offload/rng.hpp"
#include "offload/spbp.hpp"
#include "offload/types.hpp"

namespace offload {

/// Servers plus the source itself, restricted to nodes with mu_i^c > 0; sorted.
std::vector<NodeId> offload_candidates(const Topology& topo, const ServiceRates& mu, NodeId source,
                                       TypeId type);

/// Minimizes B_m^(i) + B_i^(c) + Q_i^(c)(t) over the candidates; ties to the
/// lowest node id. `compute_queues` is indexed by task type.
NodeId spbp_offload_destination(NodeId source, TypeId type, const BiasTable& bias,
                                std::span<const NodeId> candidates, const QueueBank& compute_queues);

/// Minimizes Q_i^(c)(t) over the candidates; ties to the lowest node id.
NodeId bp_offload_destination(NodeId source, TypeId type, std::span<const NodeId> candidates,
                              const QueueBank& compute_queues);

/// SP-BP with one commodity per fixed destination node, biased by the
/// shortest-path distance to that destination on the connectivity graph.
class FixedDestinationRouting {
 public:
  FixedDestinationRouting(const BiasTable& bias, std::vector<NodeId> destinations);

  std::size_t num_commodities() const { return destinations_.size(); }
  int commodity_of(NodeId destination) const;
  NodeId destination(int commodity) const { return destinations_.at(static_cast<std::size_t>(commodity)); }
  const BiasMatrix& bias() const { return bias_; }

  SlotDecision decide(const Topology& topo, const ConflictGraph& cg, const QueueState& routing_queues,
                      std::span<const int> rates) const {
    return spbp_decide(topo, cg, routing_queues, bias_, rates);
  }

 private:
  std::vector<NodeId> destinations_;
  std::vector<int> commodity_;  // node -> commodity, -1 if not a destination
  BiasMatrix bias_;
};

/// Scheduling for jobs that already committed to a next hop: the commodity
/// of a queue is its next-hop node and a direction's utility is R * Q.
SlotDecision next_hop_decide(const Topology& topo, const ConflictGraph& cg, const QueueState& link_queues,
                             std::span<const int> rates);

struct PolicyAction {
  bool process = false;
  NodeId next_hop = kNoNode;
};

/// Per-source forwarding and processing weights from the static LP optimum.
class StaticPolicy {
 public:
  struct NodeWeights {
    double process = 0.0;
    std::vector<std::pair<NodeId, double>> forward;
  };

  StaticPolicy() = default;
  StaticPolicy(const FlowProblem& p, const FlowSolution& s);

  void set_process_weight(NodeId source, NodeId node, double w);
  void set_forward_weight(NodeId source, NodeId node, NodeId next_hop, double w);

  /// Weights at `node` for jobs from `source`; all-zero if unknown.
  const NodeWeights& weights(NodeId source, NodeId node) const;

 private:
  NodeWeights& slot(NodeId source, NodeId node);

  std::unordered_map<NodeId, std::unordered_map<NodeId, NodeWeights>> weights_;
};

/// Samples process/forward proportionally to the weights. With all weights
/// zero, processes if `can_process`, otherwise forwards to a uniformly random
/// neighbor.
PolicyAction lp_policy_step(NodeId source, NodeId node, const StaticPolicy& policy, const Topology& topo,
                            bool can_process, Rng& rng);

}  // namespace offload
