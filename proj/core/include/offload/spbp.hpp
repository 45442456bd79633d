#pragma once

// Shortest-path-biased backpressure (SP-BP) on the extended graph.
//
// One routing slot runs four steps over a commodity space:
//   1. per directed link, pick the commodity with the largest biased
//      backlog differential U_i - U_j, where U = Q + B;
//   2. clamp that differential at zero to get the link weight w_ij;
//   3. activate a conflict-free link set maximizing sum R * w~ (approximated
//      by the local greedy scheduler);
//   4. give each activated link's whole real-time rate to its commodity.
//
// The commodity space is abstract: joint offloading routes task types to
// their virtual sinks, separated schemes route to fixed destination nodes.

#include <span>
#include <vector>

#include "offload/extended.hpp"
#include "offload/netgraph.hpp"
#include "offload/queueing.hpp"
#include "offload/types.hpp"

namespace offload {

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return d_[from * n_ + to]; }
  double& operator()(std::size_t from, std::size_t to) { return d_[from * n_ + to]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

struct WeightedArc {
  int from;
  int to;
  double weight;
};

/// Floyd-Warshall over non-negative arc weights; unreachable pairs are +inf.
DistanceMatrix all_pairs_shortest_paths(std::size_t num_vertices, std::span<const WeightedArc> arcs);

/// Per-node, per-commodity bias B_i^(k).
class BiasMatrix {
 public:
  BiasMatrix() = default;
  BiasMatrix(std::size_t num_nodes, std::size_t num_commodities)
      : num_nodes_(num_nodes), num_commodities_(num_commodities), values_(num_nodes * num_commodities, 0.0) {}

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_commodities() const { return num_commodities_; }
  double operator()(NodeId node, int commodity) const { return values_[idx(node, commodity)]; }
  double& operator()(NodeId node, int commodity) { return values_[idx(node, commodity)]; }

 private:
  std::size_t idx(NodeId node, int commodity) const {
    return static_cast<std::size_t>(node) * num_commodities_ + static_cast<std::size_t>(commodity);
  }

  std::size_t num_nodes_ = 0;
  std::size_t num_commodities_ = 0;
  std::vector<double> values_;
};

/// Queue-agnostic shortest-path distances on the extended graph with edge
/// weights sigma_ij = rbar * rmax / r_ij.
class BiasTable {
 public:
  BiasTable(double rbar, double rmax, std::vector<double> wireless_sigma, std::vector<double> virtual_sigma,
            DistanceMatrix dist, std::size_t num_physical, int num_types);

  double rbar() const { return rbar_; }
  double rmax() const { return rmax_; }
  /// Weight of wireless link `link` (same in both directions).
  double wireless_sigma(LinkId link) const { return wireless_sigma_.at(static_cast<std::size_t>(link)); }
  /// Weights of the virtual links, aligned with ExtendedGraph::virtual_links().
  std::span<const double> virtual_sigma() const { return virtual_sigma_; }

  std::size_t num_physical() const { return num_physical_; }
  int num_types() const { return num_types_; }

  /// Distance between any two extended-graph vertices.
  double distance(std::size_t from, std::size_t to) const { return dist_(from, to); }
  /// B_i^(c): distance from vertex i to the sink of type c.
  double to_sink(std::size_t vertex, TypeId type) const {
    return dist_(vertex, num_physical_ + static_cast<std::size_t>(type));
  }
  /// Distance between physical nodes (wireless links only).
  double between(NodeId from, NodeId to) const {
    return dist_(static_cast<std::size_t>(from), static_cast<std::size_t>(to));
  }

  /// Commodities = task types.
  BiasMatrix sink_bias() const;
  /// Commodities = the given destination nodes, in order.
  BiasMatrix destination_bias(std::span<const NodeId> destinations) const;

 private:
  double rbar_;
  double rmax_;
  std::vector<double> wireless_sigma_;
  std::vector<double> virtual_sigma_;
  DistanceMatrix dist_;
  std::size_t num_physical_;
  int num_types_;
};

/// Throws std::runtime_error if some physical node cannot reach some sink.
BiasTable compute_bias_table(const ExtendedGraph& eg);

struct LinkChoice {
  int commodity = 0;
  double weight = 0.0;  // w_ij >= 0
};

/// Optimal commodity and weight per directed link, indexed by arc_index().
using CommoditySelection = std::vector<LinkChoice>;

CommoditySelection select_commodities(const Topology& topo, const QueueState& qs, const BiasMatrix& bias);

/// Scheduling utility of one undirected link and the direction that earned it.
struct LinkUtility {
  double value = 0.0;
  bool reverse = false;  // false: a->b
};

/// utility = R_e,t * w_ij * 1(Q_i^(c*) > 0), maximized over the two directions.
std::vector<LinkUtility> build_utilities(const Topology& topo, const CommoditySelection& sel,
                                         const QueueState& qs, std::span<const int> rates);

std::vector<double> utility_values(std::span<const LinkUtility> utilities);

class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::size_t num_links) : active_(num_links, false) {}

  std::size_t size() const { return active_.size(); }
  bool active(LinkId link) const { return active_.at(static_cast<std::size_t>(link)); }
  void set(LinkId link, bool on = true) { active_.at(static_cast<std::size_t>(link)) = on; }
  std::vector<LinkId> links() const;
  double total(std::span<const double> utility) const;
  bool independent_in(const ConflictGraph& cg) const;

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<bool> active_;
};

/// Local greedy scheduling: a link joins when its utility beats every
/// undecided conflicting neighbor (ties to the lower link id), then its
/// neighbors drop out. Zero-utility links are never scheduled.
Schedule lgs_schedule(const ConflictGraph& cg, std::span<const double> utility);

/// Exact maximum-weight independent set by enumeration; at most 20 links.
Schedule mwis_bruteforce(const ConflictGraph& cg, std::span<const double> utility);

struct Transmission {
  LinkId link;
  NodeId from;
  NodeId to;
  int commodity;
  int quota;  // mu_ij^(c)(t); the actual transfer is min(quota, backlog)
};

using TransmitPlan = std::vector<Transmission>;

TransmitPlan make_transmit_plan(const Topology& topo, const Schedule& sched, const CommoditySelection& sel,
                                std::span<const LinkUtility> utilities, std::span<const int> rates);

/// Everything decided in one routing slot.
struct SlotDecision {
  CommoditySelection selection;
  std::vector<LinkUtility> utilities;
  Schedule schedule;
  TransmitPlan plan;
};

SlotDecision spbp_decide(const Topology& topo, const ConflictGraph& cg, const QueueState& qs,
                         const BiasMatrix& bias, std::span<const int> rates);

}  // namespace offload
