#pragma once

// Extended graph: the connectivity graph plus one virtual sink per task type.
// A directed virtual link (i -> sink c) models processing a type-c job at
// node i; its rate is the service rate mu_i^c.

#include <span>
#include <string>
#include <vector>

#include "offload/netgraph.hpp"
#include "offload/types.hpp"

namespace offload {

/// Per-node, per-type service rates (jobs/slot).
class ServiceRates {
 public:
  ServiceRates() = default;
  ServiceRates(std::size_t num_nodes, int num_types)
      : num_nodes_(num_nodes), num_types_(num_types),
        rates_(num_nodes * static_cast<std::size_t>(num_types), 0.0) {}

  std::size_t num_nodes() const { return num_nodes_; }
  int num_types() const { return num_types_; }

  double operator()(NodeId node, TypeId type) const { return rates_.at(index(node, type)); }
  void set(NodeId node, TypeId type, double mu);

  /// Rates of one node, indexed by type.
  std::span<const double> of_node(NodeId node) const {
    return std::span<const double>(rates_).subspan(index(node, 0), static_cast<std::size_t>(num_types_));
  }

  bool operator==(const ServiceRates&) const = default;

 private:
  std::size_t index(NodeId node, TypeId type) const {
    return static_cast<std::size_t>(node) * static_cast<std::size_t>(num_types_) +
           static_cast<std::size_t>(type);
  }

  std::size_t num_nodes_ = 0;
  int num_types_ = 0;
  std::vector<double> rates_;
};

struct TypeScaling {
  double factor = 1.0;
  bool servers_only = false;
};

/// How typed service rates derive from base rates, one entry per type.
struct ServiceScheme {
  std::vector<TypeScaling> types;

  /// mu^0 = 0.6 mu, mu^1 = mu on servers only.
  static ServiceScheme two_type();
  /// mu^0 = 0.125 mu.
  static ServiceScheme single_type();
};

ServiceRates derive_typed_service_rates(const Topology& topo, const ServiceScheme& scheme);

struct VirtualLink {
  NodeId node;
  TypeId type;
  double rate;
};

class ExtendedGraph {
 public:
  ExtendedGraph(Topology base, ServiceRates mu, int num_types, std::vector<VirtualLink> links);

  const Topology& base() const { return base_; }
  const ServiceRates& service_rates() const { return mu_; }
  int num_types() const { return num_types_; }
  std::size_t num_physical() const { return base_.num_nodes(); }
  std::size_t num_vertices() const { return base_.num_nodes() + static_cast<std::size_t>(num_types_); }
  NodeId sink(TypeId type) const { return static_cast<NodeId>(base_.num_nodes()) + type; }
  bool is_sink(NodeId v) const { return v >= static_cast<NodeId>(base_.num_nodes()); }

  /// Sorted by (node, type).
  std::span<const VirtualLink> virtual_links() const { return virtual_links_; }
  bool has_virtual_link(NodeId node, TypeId type) const { return mu_(node, type) > 0.0; }

 private:
  Topology base_;
  ServiceRates mu_;
  int num_types_;
  std::vector<VirtualLink> virtual_links_;
};

/// Throws std::invalid_argument when rates contradict roles, and
/// std::runtime_error when some type has no capable node.
ExtendedGraph build_extended_graph(const Topology& topo, const ServiceRates& mu, int num_types);

}  // namespace offload
