#include "offload/baselines.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/core.h>

namespace offload {

std::vector<NodeId> offload_candidates(const Topology& topo, const ServiceRates& mu, NodeId source,
                                       TypeId type) {
  std::vector<NodeId> out;
  for (const Node& n : topo.nodes()) {
    const bool eligible = n.role == NodeRole::kServer || n.id == source;
    if (eligible && mu(n.id, type) > 0.0) out.push_back(n.id);
  }
  return out;
}

NodeId spbp_offload_destination(NodeId source, TypeId type, const BiasTable& bias,
                                std::span<const NodeId> candidates, const QueueBank& compute_queues) {
  if (candidates.empty()) throw std::invalid_argument("no offloading candidate");
  NodeId best = kNoNode;
  double best_score = std::numeric_limits<double>::infinity();
  for (NodeId i : candidates) {
    const double score = bias.between(source, i) + bias.to_sink(static_cast<std::size_t>(i), type) +
                         compute_queues.size(i, type);
    if (score < best_score || (score == best_score && i < best)) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

NodeId bp_offload_destination(NodeId source, TypeId type, std::span<const NodeId> candidates,
                              const QueueBank& compute_queues) {
  (void)source;
  if (candidates.empty()) throw std::invalid_argument("no offloading candidate");
  NodeId best = kNoNode;
  int best_q = std::numeric_limits<int>::max();
  for (NodeId i : candidates) {
    const int q = compute_queues.size(i, type);
    if (q < best_q || (q == best_q && i < best)) {
      best_q = q;
      best = i;
    }
  }
  return best;
}

FixedDestinationRouting::FixedDestinationRouting(const BiasTable& bias, std::vector<NodeId> destinations)
    : destinations_(std::move(destinations)), commodity_(bias.num_physical(), -1),
      bias_(bias.destination_bias(destinations_)) {
  for (std::size_t k = 0; k < destinations_.size(); ++k) {
    commodity_.at(static_cast<std::size_t>(destinations_[k])) = static_cast<int>(k);
  }
}

int FixedDestinationRouting::commodity_of(NodeId destination) const {
  const int c = commodity_.at(static_cast<std::size_t>(destination));
  if (c < 0) throw std::out_of_range(fmt::format("node {} is not a routing destination", destination));
  return c;
}

SlotDecision next_hop_decide(const Topology& topo, const ConflictGraph& cg, const QueueState& link_queues,
                             std::span<const int> rates) {
  if (link_queues.num_commodities() != topo.num_nodes()) {
    throw std::invalid_argument("next-hop queues need one commodity per node");
  }
  SlotDecision d;
  d.selection.resize(topo.num_arcs());
  for (int a = 0; a < static_cast<int>(topo.num_arcs()); ++a) {
    const Arc arc = topo.arc(a);
    d.selection[static_cast<std::size_t>(a)] = {arc.to, static_cast<double>(link_queues(arc.from, arc.to))};
  }
  d.utilities = build_utilities(topo, d.selection, link_queues, rates);
  d.schedule = lgs_schedule(cg, utility_values(d.utilities));
  d.plan = make_transmit_plan(topo, d.schedule, d.selection, d.utilities, rates);
  return d;
}

StaticPolicy::StaticPolicy(const FlowProblem& p, const FlowSolution& s) {
  if (s.status != LpStatus::kOptimal) throw std::invalid_argument("policy needs an optimal LP solution");
  for (std::size_t m = 0; m < p.tasks.size(); ++m) {
    const NodeId source = p.tasks[m].source;
    for (std::size_t v = 0; v < p.num_nodes; ++v) {
      if (s.node_flow[m][v] > 0.0) set_process_weight(source, static_cast<NodeId>(v), s.node_flow[m][v]);
    }
    for (std::size_t a = 0; a < p.arcs.size(); ++a) {
      if (s.arc_flow[m][a] > 0.0) set_forward_weight(source, p.arcs[a].tail, p.arcs[a].head, s.arc_flow[m][a]);
    }
  }
}

StaticPolicy::NodeWeights& StaticPolicy::slot(NodeId source, NodeId node) { return weights_[source][node]; }

void StaticPolicy::set_process_weight(NodeId source, NodeId node, double w) {
  if (w < 0.0) throw std::invalid_argument("policy weights must be >= 0");
  slot(source, node).process = w;
}

void StaticPolicy::set_forward_weight(NodeId source, NodeId node, NodeId next_hop, double w) {
  if (w < 0.0) throw std::invalid_argument("policy weights must be >= 0");
  auto& fw = slot(source, node).forward;
  for (auto& [hop, weight] : fw) {
    if (hop == next_hop) {
      weight = w;
      return;
    }
  }
  fw.emplace_back(next_hop, w);
  std::sort(fw.begin(), fw.end());
}

const StaticPolicy::NodeWeights& StaticPolicy::weights(NodeId source, NodeId node) const {
  static const NodeWeights kEmpty;
  const auto s = weights_.find(source);
  if (s == weights_.end()) return kEmpty;
  const auto n = s->second.find(node);
  return n == s->second.end() ? kEmpty : n->second;
}

PolicyAction lp_policy_step(NodeId source, NodeId node, const StaticPolicy& policy, const Topology& topo,
                            bool can_process, Rng& rng) {
  const auto& w = policy.weights(source, node);
  double total = w.process;
  for (const auto& [hop, weight] : w.forward) total += weight;

  if (!(total > 0.0)) {
    if (can_process) return {true, kNoNode};
    const auto nbs = topo.neighbors(node);
    if (nbs.empty()) throw std::runtime_error(fmt::format("node {} can neither process nor forward", node));
    const auto k = std::uniform_int_distribution<std::size_t>(0, nbs.size() - 1)(rng);
    return {false, nbs[k].node};
  }

  double x = std::uniform_real_distribution<double>(0.0, total)(rng);
  if (x < w.process) return {true, kNoNode};
  x -= w.process;
  for (const auto& [hop, weight] : w.forward) {
    if (x < weight) return {false, hop};
    x -= weight;
  }
  // Rounding at the top of the range: fall back to the last positive weight.
  for (auto it = w.forward.rbegin(); it != w.forward.rend(); ++it) {
    if (it->second > 0.0) return {false, it->first};
  }
  return {true, kNoNode};
}

}  // namespace offload
