#pragma once

// Connectivity graph, conflict graph, and the 3-tier random network
// generator used by the experiments.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "offload/types.hpp"

namespace offload {

enum class NodeRole { kClient, kRelay, kServer };

std::string_view to_string(NodeRole role);
NodeRole parse_role(std::string_view name);

struct Node {
  NodeId id = kNoNode;
  NodeRole role = NodeRole::kClient;
  double base_mu = 0.0;  // base service rate, jobs/slot

  bool operator==(const Node&) const = default;
};

/// Undirected wireless link; endpoints are stored with a < b.
struct Link {
  LinkId id = -1;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  double rate = 0.0;  // long-term rate r_e, jobs/slot

  bool operator==(const Link&) const = default;
};

struct Neighbor {
  NodeId node;
  LinkId link;
};

/// Directed view of a link. Directed index 2*id is a->b, 2*id+1 is b->a.
struct Arc {
  LinkId link;
  NodeId from;
  NodeId to;
};

inline constexpr int arc_index(LinkId link, bool reverse) { return 2 * link + (reverse ? 1 : 0); }

class Topology {
 public:
  NodeId add_node(NodeRole role, double base_mu = 0.0);
  /// Adds the undirected link {u, v}. Throws on self-loops, duplicates and
  /// unknown endpoints.
  LinkId add_link(NodeId u, NodeId v, double rate = 1.0);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_links() const { return links_.size(); }
  std::size_t num_arcs() const { return 2 * links_.size(); }

  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Link& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::span<const Neighbor> neighbors(NodeId id) const {
    return adjacency_.at(static_cast<std::size_t>(id));
  }

  Arc arc(int index) const;
  std::optional<LinkId> find_link(NodeId u, NodeId v) const;
  std::vector<NodeId> nodes_with_role(NodeRole role) const;

  void set_link_rate(LinkId id, double rate);
  void set_base_mu(NodeId id, double mu);

  /// Breadth-first reachability from node 0 covers every node.
  bool is_connected() const;

  bool operator==(const Topology& other) const {
    return nodes_ == other.nodes_ && links_ == other.links_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Conflict graph over link ids.
class ConflictGraph {
 public:
  explicit ConflictGraph(std::size_t num_links = 0) : adjacency_(num_links) {}

  void add_conflict(LinkId e1, LinkId e2);

  std::size_t num_vertices() const { return adjacency_.size(); }
  std::size_t num_conflicts() const { return num_conflicts_; }
  std::span<const LinkId> conflicts(LinkId e) const {
    return adjacency_.at(static_cast<std::size_t>(e));
  }
  int degree(LinkId e) const { return static_cast<int>(conflicts(e).size()); }
  bool in_conflict(LinkId e1, LinkId e2) const;
  /// Every conflict once, as (low, high), sorted.
  std::vector<std::pair<LinkId, LinkId>> conflict_pairs() const;

 private:
  std::vector<std::vector<LinkId>> adjacency_;
  std::size_t num_conflicts_ = 0;
};

/// Line graph of the connectivity graph: links conflict iff they share an endpoint.
ConflictGraph build_conflict_graph(const Topology& topo);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GenParams {
  std::vector<int> k_choices{3, 4, 5, 6};
  int tier2_per_core = 4;
  double edge_server_frac = 0.8;
  double intra_group_edge_prob = 0.7;
  double second_link_prob = 0.1;
  // Relative odds of a client attaching to an edge vs. a core server.
  double edge_server_weight = 10.0;
  double core_server_weight = 1.0;
  int total_nodes = 100;
  double pareto_shape = 2.0;
  double pareto_scale = 8.0;
  Interval client_mu_range{8.0, 12.0};
  int max_retries = 100;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

/// Number of dedicated relays among `tier2_total` tier-2 nodes.
int relay_count(int tier2_total, double edge_server_frac);

/// Draws a 3-tier topology. Node ids are assigned cores first, then tier-2
/// group by group, then clients. Link rates are left at 1; see
/// sample_long_term_rates.
Topology generate_topology(std::uint64_t seed, const GenParams& params);

/// Assigns every link an independent U(range) long-term rate.
Topology sample_long_term_rates(std::uint64_t seed, Topology topo, Interval range = {10.0, 20.0});

}  // namespace offload
