#pragma once

#include <random>
#include <vector>

#include "offload/engine.hpp"

namespace offload::testing {

/// client 0 -- relay 1 -- server 2, wireless rates 2 and 2, one task type,
/// mu_0 = 1 and mu_2 = 4.
struct Path3 {
  Topology topo;
  ServiceRates mu;
  ConflictGraph cg;

  Path3() {
    topo.add_node(NodeRole::kClient, 8.0);
    topo.add_node(NodeRole::kRelay, 0.0);
    topo.add_node(NodeRole::kServer, 32.0);
    topo.add_link(0, 1, 2.0);
    topo.add_link(1, 2, 2.0);
    mu = ServiceRates(3, 1);
    mu.set(0, 0, 1.0);
    mu.set(2, 0, 4.0);
    cg = build_conflict_graph(topo);
  }

  ExtendedGraph extended() const { return build_extended_graph(topo, mu, 1); }
};

/// Random connected topology: a random spanning tree plus extra edges.
/// Every node gets a role; relays have no service rate.
inline Topology random_topology(std::mt19937_64& rng, int n, double extra_edge_prob) {
  Topology t;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> mu(1.0, 10.0);
  for (int v = 0; v < n; ++v) {
    const double r = u01(rng);
    const NodeRole role = v == 0 ? NodeRole::kServer : r < 0.2 ? NodeRole::kRelay : r < 0.5 ? NodeRole::kServer
                                                                                            : NodeRole::kClient;
    t.add_node(role, role == NodeRole::kRelay ? 0.0 : mu(rng));
  }
  std::uniform_real_distribution<double> rate(1.0, 20.0);
  for (int v = 1; v < n; ++v) {
    const int parent = std::uniform_int_distribution<int>(0, v - 1)(rng);
    t.add_link(parent, v, rate(rng));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!t.find_link(a, b) && u01(rng) < extra_edge_prob) t.add_link(a, b, rate(rng));
    }
  }
  return t;
}

/// Random conflict graph over `links` vertices with edge probability p.
inline ConflictGraph random_conflict_graph(std::mt19937_64& rng, int links, double p) {
  ConflictGraph cg(static_cast<std::size_t>(links));
  std::bernoulli_distribution edge(p);
  for (int a = 0; a < links; ++a) {
    for (int b = a + 1; b < links; ++b) {
      if (edge(rng)) cg.add_conflict(a, b);
    }
  }
  return cg;
}

inline Instance path3_instance(std::vector<TaskSpec> tasks) {
  Path3 p;
  Instance i;
  i.topology = p.topo;
  i.mu = p.mu;
  i.num_types = 1;
  i.tasks = std::move(tasks);
  return i;
}

}  // namespace offload::testing
