#include "offload/extended.hpp"

#include <stdexcept>
#include <utility>

#include <fmt/core.h>

namespace offload {

void ServiceRates::set(NodeId node, TypeId type, double mu) {
  if (mu < 0.0) throw std::invalid_argument("service rate must be >= 0");
  rates_.at(index(node, type)) = mu;
}

ServiceScheme ServiceScheme::two_type() { return {{{0.6, false}, {1.0, true}}}; }

ServiceScheme ServiceScheme::single_type() { return {{{0.125, false}}}; }

ServiceRates derive_typed_service_rates(const Topology& topo, const ServiceScheme& scheme) {
  if (scheme.types.empty()) throw std::invalid_argument("service scheme needs at least one type");
  ServiceRates mu(topo.num_nodes(), static_cast<int>(scheme.types.size()));
  for (const Node& n : topo.nodes()) {
    for (std::size_t c = 0; c < scheme.types.size(); ++c) {
      const TypeScaling& s = scheme.types[c];
      if (s.factor < 0.0) throw std::invalid_argument("service scaling factor must be >= 0");
      double rate = n.base_mu * s.factor;
      if (n.role == NodeRole::kRelay) rate = 0.0;
      if (s.servers_only && n.role != NodeRole::kServer) rate = 0.0;
      mu.set(n.id, static_cast<TypeId>(c), rate);
    }
  }
  return mu;
}

ExtendedGraph::ExtendedGraph(Topology base, ServiceRates mu, int num_types,
                             std::vector<VirtualLink> links)
    : base_(std::move(base)), mu_(std::move(mu)), num_types_(num_types),
      virtual_links_(std::move(links)) {}

ExtendedGraph build_extended_graph(const Topology& topo, const ServiceRates& mu, int num_types) {
  if (num_types < 1) throw std::invalid_argument("at least one task type is required");
  if (mu.num_nodes() != topo.num_nodes() || mu.num_types() != num_types) {
    throw std::invalid_argument("service rates do not match the topology / type set");
  }
  std::vector<VirtualLink> links;
  std::vector<int> capable(static_cast<std::size_t>(num_types), 0);
  for (const Node& n : topo.nodes()) {
    for (TypeId c = 0; c < num_types; ++c) {
      const double rate = mu(n.id, c);
      if (rate <= 0.0) continue;
      if (n.role == NodeRole::kRelay) {
        throw std::invalid_argument(fmt::format("relay {} has a positive service rate", n.id));
      }
      links.push_back({n.id, c, rate});
      ++capable[static_cast<std::size_t>(c)];
    }
  }
  for (TypeId c = 0; c < num_types; ++c) {
    if (capable[static_cast<std::size_t>(c)] == 0) {
      throw std::runtime_error(fmt::format("no node can process task type {}", c));
    }
  }
  return ExtendedGraph(topo, mu, num_types, std::move(links));
}

}  // namespace offload
