#include "offload/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

#include "offload/rng.hpp"

namespace offload {

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kClient:
      return "client";
    case NodeRole::kRelay:
      return "relay";
    case NodeRole::kServer:
      return "server";
  }
  return "unknown";
}

NodeRole parse_role(std::string_view name) {
  if (name == "client") return NodeRole::kClient;
  if (name == "relay") return NodeRole::kRelay;
  if (name == "server") return NodeRole::kServer;
  throw std::invalid_argument(fmt::format("unknown node role '{}'", name));
}

NodeId Topology::add_node(NodeRole role, double base_mu) {
  if (base_mu < 0.0) throw std::invalid_argument("base service rate must be >= 0");
  if (role == NodeRole::kRelay && base_mu != 0.0) {
    throw std::invalid_argument("relay nodes cannot have a service rate");
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({id, role, base_mu});
  adjacency_.emplace_back();
  return id;
}

LinkId Topology::add_link(NodeId u, NodeId v, double rate) {
  const auto n = static_cast<NodeId>(nodes_.size());
  if (u < 0 || v < 0 || u >= n || v >= n) {
    throw std::out_of_range(fmt::format("link ({}, {}) references an unknown node", u, v));
  }
  if (u == v) throw std::invalid_argument(fmt::format("self-loop at node {}", u));
  if (find_link(u, v)) throw std::invalid_argument(fmt::format("duplicate link ({}, {})", u, v));
  if (!(rate > 0.0)) throw std::invalid_argument("link rate must be positive");
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back({id, std::min(u, v), std::max(u, v), rate});
  adjacency_[static_cast<std::size_t>(u)].push_back({v, id});
  adjacency_[static_cast<std::size_t>(v)].push_back({u, id});
  return id;
}

Arc Topology::arc(int index) const {
  const Link& l = link(index / 2);
  return (index % 2 == 0) ? Arc{l.id, l.a, l.b} : Arc{l.id, l.b, l.a};
}

std::optional<LinkId> Topology::find_link(NodeId u, NodeId v) const {
  if (u < 0 || static_cast<std::size_t>(u) >= adjacency_.size()) return std::nullopt;
  for (const Neighbor& nb : adjacency_[static_cast<std::size_t>(u)]) {
    if (nb.node == v) return nb.link;
  }
  return std::nullopt;
}

std::vector<NodeId> Topology::nodes_with_role(NodeRole role) const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (n.role == role) out.push_back(n.id);
  }
  return out;
}

void Topology::set_link_rate(LinkId id, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("link rate must be positive");
  links_.at(static_cast<std::size_t>(id)).rate = rate;
}

void Topology::set_base_mu(NodeId id, double mu) {
  Node& n = nodes_.at(static_cast<std::size_t>(id));
  if (mu < 0.0) throw std::invalid_argument("base service rate must be >= 0");
  if (n.role == NodeRole::kRelay && mu != 0.0) {
    throw std::invalid_argument("relay nodes cannot have a service rate");
  }
  n.base_mu = mu;
}

bool Topology::is_connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : neighbors(u)) {
      auto& s = seen[static_cast<std::size_t>(nb.node)];
      if (!s) {
        s = 1;
        ++reached;
        frontier.push(nb.node);
      }
    }
  }
  return reached == nodes_.size();
}

void ConflictGraph::add_conflict(LinkId e1, LinkId e2) {
  const auto n = static_cast<LinkId>(adjacency_.size());
  if (e1 < 0 || e2 < 0 || e1 >= n || e2 >= n) throw std::out_of_range("conflict on unknown link");
  if (e1 == e2) throw std::invalid_argument("a link cannot conflict with itself");
  if (in_conflict(e1, e2)) return;
  adjacency_[static_cast<std::size_t>(e1)].push_back(e2);
  adjacency_[static_cast<std::size_t>(e2)].push_back(e1);
  ++num_conflicts_;
}

bool ConflictGraph::in_conflict(LinkId e1, LinkId e2) const {
  const auto c = conflicts(e1);
  return std::find(c.begin(), c.end(), e2) != c.end();
}

std::vector<std::pair<LinkId, LinkId>> ConflictGraph::conflict_pairs() const {
  std::vector<std::pair<LinkId, LinkId>> out;
  out.reserve(num_conflicts_);
  for (std::size_t e = 0; e < adjacency_.size(); ++e) {
    for (LinkId f : adjacency_[e]) {
      if (static_cast<LinkId>(e) < f) out.emplace_back(static_cast<LinkId>(e), f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConflictGraph build_conflict_graph(const Topology& topo) {
  ConflictGraph cg(topo.num_links());
  for (const Node& n : topo.nodes()) {
    const auto nbs = topo.neighbors(n.id);
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbs.size(); ++j) cg.add_conflict(nbs[i].link, nbs[j].link);
    }
  }
  return cg;
}

void GenParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(fmt::format("invalid generator parameter: {}", what));
  };
  require(!k_choices.empty(), "k_choices is empty");
  for (int k : k_choices) require(k >= 1, "k_choices entries must be >= 1");
  require(tier2_per_core >= 0, "tier2_per_core must be >= 0");
  for (double p : {edge_server_frac, intra_group_edge_prob, second_link_prob}) {
    require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  }
  require(edge_server_weight >= 0.0 && core_server_weight >= 0.0, "attachment weights must be >= 0");
  require(core_server_weight > 0.0 || edge_server_frac > 0.0, "no attachable server");
  const int kmax = *std::max_element(k_choices.begin(), k_choices.end());
  require(total_nodes >= (1 + tier2_per_core) * kmax, "total_nodes too small for the largest k");
  require(pareto_shape > 0.0 && pareto_scale > 0.0, "Pareto parameters must be positive");
  require(client_mu_range.lo > 0.0 && client_mu_range.lo <= client_mu_range.hi,
          "client_mu_range must be a positive interval");
  require(max_retries >= 1, "max_retries must be >= 1");
}

int relay_count(int tier2_total, double edge_server_frac) {
  return static_cast<int>(std::lround((1.0 - edge_server_frac) * tier2_total));
}

namespace {

struct ServerSlot {
  NodeId id;
  double weight;
};

NodeId pick_weighted(const std::vector<ServerSlot>& servers, NodeId exclude, Rng& rng) {
  double total = 0.0;
  for (const auto& s : servers) {
    if (s.id != exclude) total += s.weight;
  }
  if (total <= 0.0) return kNoNode;
  double x = std::uniform_real_distribution<double>(0.0, total)(rng);
  NodeId last = kNoNode;
  for (const auto& s : servers) {
    if (s.id == exclude || s.weight <= 0.0) continue;
    last = s.id;
    if (x < s.weight) return s.id;
    x -= s.weight;
  }
  return last;
}

Topology draw_instance(const GenParams& p, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = p.k_choices[std::uniform_int_distribution<std::size_t>(0, p.k_choices.size() - 1)(rng)];
  const int tier2 = p.tier2_per_core * k;
  const int relays = relay_count(tier2, p.edge_server_frac);
  const int clients = p.total_nodes - k - tier2;

  Topology topo;
  std::vector<ServerSlot> servers;  // insertion order

  for (int i = 0; i < k; ++i) {
    const NodeId core = topo.add_node(NodeRole::kServer);
    servers.push_back({core, p.core_server_weight});
  }
  for (NodeId i = 0; i < k; ++i) {
    for (NodeId j = i + 1; j < k; ++j) topo.add_link(i, j);
  }

  std::vector<char> is_relay(static_cast<std::size_t>(tier2), 0);
  std::fill_n(is_relay.begin(), relays, 1);
  std::shuffle(is_relay.begin(), is_relay.end(), rng);

  for (int g = 0; g < k; ++g) {
    std::vector<NodeId> group;
    for (int j = 0; j < p.tier2_per_core; ++j) {
      const bool relay = is_relay[static_cast<std::size_t>(g * p.tier2_per_core + j)] != 0;
      const NodeId id = topo.add_node(relay ? NodeRole::kRelay : NodeRole::kServer);
      if (!relay) servers.push_back({id, p.edge_server_weight});
      topo.add_link(g, id);
      group.push_back(id);
    }
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        if (unit(rng) < p.intra_group_edge_prob) topo.add_link(group[a], group[b]);
      }
    }
  }

  for (int i = 0; i < clients; ++i) {
    const NodeId client = topo.add_node(NodeRole::kClient);
    const NodeId first = pick_weighted(servers, kNoNode, rng);
    topo.add_link(client, first);
    if (unit(rng) < p.second_link_prob) {
      const NodeId second = pick_weighted(servers, first, rng);
      if (second != kNoNode) topo.add_link(client, second);
    }
  }

  // Server capacities: the s-th largest Pareto draw goes to the s-th inserted server.
  std::vector<double> draws;
  draws.reserve(servers.size());
  for (std::size_t s = 0; s < servers.size(); ++s) {
    const double u = unit(rng);
    draws.push_back(p.pareto_scale * std::pow(1.0 - u, -1.0 / p.pareto_shape));
  }
  std::sort(draws.begin(), draws.end(), std::greater<>());
  for (std::size_t s = 0; s < servers.size(); ++s) topo.set_base_mu(servers[s].id, draws[s]);

  std::uniform_real_distribution<double> client_mu(p.client_mu_range.lo, p.client_mu_range.hi);
  for (NodeId id : topo.nodes_with_role(NodeRole::kClient)) topo.set_base_mu(id, client_mu(rng));
  return topo;
}

}  // namespace

Topology generate_topology(std::uint64_t seed, const GenParams& params) {
  params.validate();
  Rng rng = make_rng(seed, Stream::kTopology);
  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    Topology topo = draw_instance(params, rng);
    if (topo.is_connected()) return topo;
  }
  throw std::runtime_error(
      fmt::format("no connected topology after {} attempts (seed {})", params.max_retries, seed));
}

Topology sample_long_term_rates(std::uint64_t seed, Topology topo, Interval range) {
  if (!(range.lo > 0.0) || range.hi < range.lo) {
    throw std::invalid_argument(fmt::format("invalid link-rate range [{}, {}]", range.lo, range.hi));
  }
  Rng rng = make_rng(seed, Stream::kLinkRates);
  std::uniform_real_distribution<double> dist(range.lo, range.hi);
  for (std::size_t e = 0; e < topo.num_links(); ++e) {
    const double r = (range.lo == range.hi) ? range.lo : dist(rng);
    topo.set_link_rate(static_cast<LinkId>(e), r);
  }
  return topo;
}

}  // namespace offload
