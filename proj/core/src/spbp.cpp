#include "offload/spbp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include <fmt/core.h>

namespace offload {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), d_(n * n, kInf) {
  for (std::size_t i = 0; i < n; ++i) d_[i * n + i] = 0.0;
}

DistanceMatrix all_pairs_shortest_paths(std::size_t num_vertices, std::span<const WeightedArc> arcs) {
  DistanceMatrix d(num_vertices);
  for (const WeightedArc& a : arcs) {
    if (a.weight < 0.0) throw std::invalid_argument("negative arc weight");
    const auto u = static_cast<std::size_t>(a.from);
    const auto v = static_cast<std::size_t>(a.to);
    d(u, v) = std::min(d(u, v), a.weight);
  }
  for (std::size_t k = 0; k < num_vertices; ++k) {
    for (std::size_t i = 0; i < num_vertices; ++i) {
      const double dik = d(i, k);
      if (dik == kInf) continue;
      for (std::size_t j = 0; j < num_vertices; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  return d;
}

BiasTable::BiasTable(double rbar, double rmax, std::vector<double> wireless_sigma,
                     std::vector<double> virtual_sigma, DistanceMatrix dist, std::size_t num_physical,
                     int num_types)
    : rbar_(rbar), rmax_(rmax), wireless_sigma_(std::move(wireless_sigma)),
      virtual_sigma_(std::move(virtual_sigma)), dist_(std::move(dist)), num_physical_(num_physical),
      num_types_(num_types) {}

BiasMatrix BiasTable::sink_bias() const {
  BiasMatrix b(num_physical_, static_cast<std::size_t>(num_types_));
  for (std::size_t i = 0; i < num_physical_; ++i) {
    for (TypeId c = 0; c < num_types_; ++c) b(static_cast<NodeId>(i), c) = to_sink(i, c);
  }
  return b;
}

BiasMatrix BiasTable::destination_bias(std::span<const NodeId> destinations) const {
  BiasMatrix b(num_physical_, destinations.size());
  for (std::size_t i = 0; i < num_physical_; ++i) {
    for (std::size_t k = 0; k < destinations.size(); ++k) {
      b(static_cast<NodeId>(i), static_cast<int>(k)) = between(static_cast<NodeId>(i), destinations[k]);
    }
  }
  return b;
}

BiasTable compute_bias_table(const ExtendedGraph& eg) {
  const Topology& topo = eg.base();
  const auto vlinks = eg.virtual_links();

  // Rate statistics over undirected wireless links plus virtual links.
  double sum = 0.0;
  double rmax = 0.0;
  std::size_t count = 0;
  for (const Link& l : topo.links()) {
    sum += l.rate;
    rmax = std::max(rmax, l.rate);
    ++count;
  }
  for (const VirtualLink& v : vlinks) {
    sum += v.rate;
    rmax = std::max(rmax, v.rate);
    ++count;
  }
  if (count == 0) throw std::runtime_error("extended graph has no edges");
  const double rbar = sum / static_cast<double>(count);
  const double scale = rbar * rmax;

  std::vector<double> wireless_sigma;
  std::vector<double> virtual_sigma;
  std::vector<WeightedArc> arcs;
  arcs.reserve(2 * topo.num_links() + vlinks.size());
  for (const Link& l : topo.links()) {
    const double s = scale / l.rate;
    wireless_sigma.push_back(s);
    arcs.push_back({l.a, l.b, s});
    arcs.push_back({l.b, l.a, s});
  }
  for (const VirtualLink& v : vlinks) {
    const double s = scale / v.rate;
    virtual_sigma.push_back(s);
    arcs.push_back({v.node, eg.sink(v.type), s});
  }

  DistanceMatrix dist = all_pairs_shortest_paths(eg.num_vertices(), arcs);
  for (std::size_t i = 0; i < eg.num_physical(); ++i) {
    for (TypeId c = 0; c < eg.num_types(); ++c) {
      if (!std::isfinite(dist(i, static_cast<std::size_t>(eg.sink(c))))) {
        throw std::runtime_error(fmt::format("node {} cannot reach the sink of type {}", i, c));
      }
    }
  }
  return BiasTable(rbar, rmax, std::move(wireless_sigma), std::move(virtual_sigma), std::move(dist),
                   eg.num_physical(), eg.num_types());
}

CommoditySelection select_commodities(const Topology& topo, const QueueState& qs, const BiasMatrix& bias) {
  if (qs.num_commodities() != bias.num_commodities() || qs.num_nodes() != topo.num_nodes() ||
      bias.num_nodes() != topo.num_nodes()) {
    throw std::invalid_argument("queue state and bias table disagree on shape");
  }
  const auto k = static_cast<int>(qs.num_commodities());
  CommoditySelection sel(topo.num_arcs());
  for (int a = 0; a < static_cast<int>(topo.num_arcs()); ++a) {
    const Arc arc = topo.arc(a);
    int best = 0;
    double best_diff = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double ui = qs(arc.from, c) + bias(arc.from, c);
      const double uj = qs(arc.to, c) + bias(arc.to, c);
      const double diff = ui - uj;
      if (diff > best_diff) {
        best_diff = diff;
        best = c;
      }
    }
    sel[static_cast<std::size_t>(a)] = {best, std::max(best_diff, 0.0)};
  }
  return sel;
}

std::vector<LinkUtility> build_utilities(const Topology& topo, const CommoditySelection& sel,
                                         const QueueState& qs, std::span<const int> rates) {
  if (rates.size() != topo.num_links()) throw std::invalid_argument("one real-time rate per link required");
  std::vector<LinkUtility> out(topo.num_links());
  for (const Link& l : topo.links()) {
    double u[2] = {0.0, 0.0};
    for (int dir = 0; dir < 2; ++dir) {
      const LinkChoice& ch = sel[static_cast<std::size_t>(arc_index(l.id, dir == 1))];
      const NodeId from = dir == 0 ? l.a : l.b;
      if (qs(from, ch.commodity) > 0) u[dir] = rates[static_cast<std::size_t>(l.id)] * ch.weight;
    }
    const bool reverse = u[1] > u[0];
    out[static_cast<std::size_t>(l.id)] = {reverse ? u[1] : u[0], reverse};
  }
  return out;
}

std::vector<double> utility_values(std::span<const LinkUtility> utilities) {
  std::vector<double> v;
  v.reserve(utilities.size());
  for (const LinkUtility& u : utilities) v.push_back(u.value);
  return v;
}

std::vector<LinkId> Schedule::links() const {
  std::vector<LinkId> out;
  for (std::size_t e = 0; e < active_.size(); ++e) {
    if (active_[e]) out.push_back(static_cast<LinkId>(e));
  }
  return out;
}

double Schedule::total(std::span<const double> utility) const {
  double t = 0.0;
  for (LinkId e : links()) t += utility[static_cast<std::size_t>(e)];
  return t;
}

bool Schedule::independent_in(const ConflictGraph& cg) const {
  for (LinkId e : links()) {
    for (LinkId f : cg.conflicts(e)) {
      if (active(f)) return false;
    }
  }
  return true;
}

Schedule lgs_schedule(const ConflictGraph& cg, std::span<const double> utility) {
  const std::size_t n = cg.num_vertices();
  if (utility.size() != n) throw std::invalid_argument("one utility per link required");
  enum : std::uint8_t { kUndecided, kIn, kOut };
  std::vector<std::uint8_t> state(n, kUndecided);
  std::size_t undecided = 0;
  for (std::size_t e = 0; e < n; ++e) {
    if (utility[e] < 0.0) throw std::invalid_argument("utilities must be non-negative");
    if (utility[e] > 0.0) {
      ++undecided;
    } else {
      state[e] = kOut;
    }
  }

  auto beats = [&](std::size_t e, std::size_t f) {
    return utility[e] > utility[f] || (utility[e] == utility[f] && e < f);
  };

  Schedule sched(n);
  std::vector<std::size_t> winners;
  while (undecided > 0) {
    winners.clear();
    for (std::size_t e = 0; e < n; ++e) {
      if (state[e] != kUndecided) continue;
      bool local_max = true;
      for (LinkId f : cg.conflicts(static_cast<LinkId>(e))) {
        const auto fi = static_cast<std::size_t>(f);
        if (state[fi] == kUndecided && !beats(e, fi)) {
          local_max = false;
          break;
        }
      }
      if (local_max) winners.push_back(e);
    }
    for (std::size_t e : winners) {
      state[e] = kIn;
      sched.set(static_cast<LinkId>(e));
      --undecided;
      for (LinkId f : cg.conflicts(static_cast<LinkId>(e))) {
        auto& s = state[static_cast<std::size_t>(f)];
        if (s == kUndecided) {
          s = kOut;
          --undecided;
        }
      }
    }
  }
  return sched;
}

Schedule mwis_bruteforce(const ConflictGraph& cg, std::span<const double> utility) {
  const std::size_t n = cg.num_vertices();
  if (n > 20) throw std::invalid_argument("brute-force MWIS limited to 20 links");
  if (utility.size() != n) throw std::invalid_argument("one utility per link required");

  std::vector<std::uint32_t> conflict_mask(n, 0);
  std::uint32_t positive = 0;
  for (std::size_t e = 0; e < n; ++e) {
    for (LinkId f : cg.conflicts(static_cast<LinkId>(e))) conflict_mask[e] |= 1u << f;
    if (utility[e] > 0.0) positive |= 1u << e;
  }

  std::uint32_t best_mask = 0;
  double best = 0.0;
  // Enumerate subsets of the positive-utility links only.
  for (std::uint32_t sub = positive;; sub = (sub - 1) & positive) {
    bool independent = true;
    double total = 0.0;
    for (std::size_t e = 0; e < n && independent; ++e) {
      if (!(sub & (1u << e))) continue;
      if (sub & conflict_mask[e]) independent = false;
      total += utility[e];
    }
    if (independent && (total > best || (total == best && sub < best_mask))) {
      best = total;
      best_mask = sub;
    }
    if (sub == 0) break;
  }

  Schedule sched(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (best_mask & (1u << e)) sched.set(static_cast<LinkId>(e));
  }
  return sched;
}

TransmitPlan make_transmit_plan(const Topology& topo, const Schedule& sched, const CommoditySelection& sel,
                                std::span<const LinkUtility> utilities, std::span<const int> rates) {
  TransmitPlan plan;
  for (LinkId e : sched.links()) {
    const auto ei = static_cast<std::size_t>(e);
    const bool reverse = utilities[ei].reverse;
    const LinkChoice& ch = sel[static_cast<std::size_t>(arc_index(e, reverse))];
    if (!(ch.weight > 0.0) || rates[ei] <= 0) continue;
    const Arc arc = topo.arc(arc_index(e, reverse));
    plan.push_back({e, arc.from, arc.to, ch.commodity, rates[ei]});
  }
  return plan;
}

SlotDecision spbp_decide(const Topology& topo, const ConflictGraph& cg, const QueueState& qs,
                         const BiasMatrix& bias, std::span<const int> rates) {
  SlotDecision d;
  d.selection = select_commodities(topo, qs, bias);
  d.utilities = build_utilities(topo, d.selection, qs, rates);
  d.schedule = lgs_schedule(cg, utility_values(d.utilities));
  d.plan = make_transmit_plan(topo, d.schedule, d.selection, d.utilities, rates);
  return d;
}

}  // namespace offload
