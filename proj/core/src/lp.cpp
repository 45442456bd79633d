#include "offload/lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/core.h>

namespace offload {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

FlowProblem build_lp(const Topology& topo, std::span<const TaskSpec> tasks, const ServiceRates& mu,
                     const ConflictGraph& cg) {
  if (mu.num_types() != 1) throw std::invalid_argument("joint_lp requires single task type");
  std::map<NodeId, double> by_source;
  for (const TaskSpec& t : tasks) {
    if (t.type != 0) throw std::invalid_argument("joint_lp requires single task type");
    if (t.rate < 0.0) throw std::invalid_argument("arrival rates must be >= 0");
    by_source[t.source] += t.rate;
  }

  FlowProblem p;
  p.num_nodes = topo.num_nodes();
  for (const auto& [m, rate] : by_source) p.tasks.push_back({m, rate});
  p.arcs.resize(topo.num_arcs());
  for (const Link& l : topo.links()) {
    const double capacity = l.rate / std::max(cg.degree(l.id), 1);
    for (int dir = 0; dir < 2; ++dir) {
      const Arc a = topo.arc(arc_index(l.id, dir == 1));
      p.arcs[static_cast<std::size_t>(arc_index(l.id, dir == 1))] = {a.from, a.to, l.id, capacity,
                                                                     1.0 / capacity};
    }
  }
  p.node_capacity.resize(p.num_nodes);
  p.node_cost.resize(p.num_nodes);
  p.demand.assign(p.num_nodes, 1.0);
  for (std::size_t v = 0; v < p.num_nodes; ++v) {
    const double psi = mu(static_cast<NodeId>(v), 0);
    p.node_capacity[v] = psi;
    p.node_cost[v] = psi > 0.0 ? 1.0 / psi : 0.0;
  }
  return p;
}

namespace {

// Residual network for successive shortest paths.
class MinCostFlow {
 public:
  explicit MinCostFlow(std::size_t n) : adj_(n) {}

  int add_edge(int from, int to, double cap, double cost) {
    adj_[static_cast<std::size_t>(from)].push_back({to, static_cast<int>(adj_[static_cast<std::size_t>(to)].size()), cap, cost});
    adj_[static_cast<std::size_t>(to)].push_back({from, static_cast<int>(adj_[static_cast<std::size_t>(from)].size()) - 1, 0.0, -cost});
    handles_.push_back({from, static_cast<int>(adj_[static_cast<std::size_t>(from)].size()) - 1, cap});
    return static_cast<int>(handles_.size()) - 1;
  }

  double flow_on(int handle) const {
    const Handle& h = handles_[static_cast<std::size_t>(handle)];
    return h.cap - adj_[static_cast<std::size_t>(h.from)][static_cast<std::size_t>(h.index)].cap;
  }

  enum class Result { kDone, kShort, kFailed };

  // Pushes up to `amount` from s to t along successive shortest paths.
  Result run(int s, int t, double amount, double cap_eps, double& pushed) {
    const std::size_t n = adj_.size();
    std::vector<double> dist(n);
    std::vector<int> prev_node(n);
    std::vector<int> prev_edge(n);
    std::vector<int> relax_count(n);
    std::vector<char> in_queue(n);
    pushed = 0.0;
    const double done_eps = 1e-12 * std::max(1.0, amount);
    for (int iter = 0; iter < 1'000'000; ++iter) {
      if (amount - pushed <= done_eps) return Result::kDone;
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::fill(relax_count.begin(), relax_count.end(), 0);
      std::fill(in_queue.begin(), in_queue.end(), 0);
      dist[static_cast<std::size_t>(s)] = 0.0;
      std::deque<int> queue{s};
      in_queue[static_cast<std::size_t>(s)] = 1;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        in_queue[static_cast<std::size_t>(u)] = 0;
        const auto& edges = adj_[static_cast<std::size_t>(u)];
        for (std::size_t k = 0; k < edges.size(); ++k) {
          const Edge& e = edges[k];
          if (e.cap <= cap_eps) continue;
          const double nd = dist[static_cast<std::size_t>(u)] + e.cost;
          auto& dv = dist[static_cast<std::size_t>(e.to)];
          if (nd < dv - 1e-15 * std::max(1.0, std::abs(nd))) {
            dv = nd;
            prev_node[static_cast<std::size_t>(e.to)] = u;
            prev_edge[static_cast<std::size_t>(e.to)] = static_cast<int>(k);
            if (++relax_count[static_cast<std::size_t>(e.to)] > static_cast<int>(n) + 1) return Result::kFailed;
            if (!in_queue[static_cast<std::size_t>(e.to)]) {
              in_queue[static_cast<std::size_t>(e.to)] = 1;
              queue.push_back(e.to);
            }
          }
        }
      }
      if (!std::isfinite(dist[static_cast<std::size_t>(t)])) return Result::kShort;

      double bottleneck = amount - pushed;
      for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
        const Edge& e = adj_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                            [static_cast<std::size_t>(prev_edge[static_cast<std::size_t>(v)])];
        bottleneck = std::min(bottleneck, e.cap);
      }
      for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
        Edge& e = adj_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                      [static_cast<std::size_t>(prev_edge[static_cast<std::size_t>(v)])];
        e.cap -= bottleneck;
        adj_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += bottleneck;
      }
      pushed += bottleneck;
    }
    return Result::kFailed;
  }

 private:
  struct Edge {
    int to;
    int rev;
    double cap;
    double cost;
  };
  struct Handle {
    int from;
    int index;
    double cap;
  };
  std::vector<std::vector<Edge>> adj_;
  std::vector<Handle> handles_;
};

}  // namespace

FlowSolution solve_lp(const FlowProblem& p) {
  const std::size_t n = p.num_nodes;
  const std::size_t num_tasks = p.tasks.size();
  FlowSolution sol;
  sol.arc_flow.assign(num_tasks, std::vector<double>(p.arcs.size(), 0.0));
  sol.node_flow.assign(num_tasks, std::vector<double>(n, 0.0));
  sol.makespan.assign(num_tasks, 0.0);

  double total = 0.0;
  double cap_scale = 1.0;
  for (const FlowTask& t : p.tasks) total += t.rate;
  for (const FlowArc& a : p.arcs) cap_scale = std::max(cap_scale, a.capacity);
  for (double c : p.node_capacity) cap_scale = std::max(cap_scale, c);
  if (total <= 0.0) {
    sol.status = LpStatus::kOptimal;
    return sol;
  }

  const int source = static_cast<int>(n);
  const int sink = static_cast<int>(n) + 1;
  MinCostFlow mcf(n + 2);
  std::vector<int> task_edge;
  for (const FlowTask& t : p.tasks) task_edge.push_back(mcf.add_edge(source, t.source, t.rate, 0.0));
  std::vector<int> arc_edge;
  for (const FlowArc& a : p.arcs) arc_edge.push_back(mcf.add_edge(a.tail, a.head, a.capacity, a.cost));
  std::vector<int> node_edge(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (p.node_capacity[v] > 0.0 && p.demand[v] > 0.0) {
      node_edge[v] = mcf.add_edge(static_cast<int>(v), sink, p.node_capacity[v] / p.demand[v], p.node_cost[v]);
    }
  }

  const double cap_eps = 1e-13 * cap_scale;
  double pushed = 0.0;
  switch (mcf.run(source, sink, total, cap_eps, pushed)) {
    case MinCostFlow::Result::kDone:
      break;
    case MinCostFlow::Result::kShort:
      sol.status = total - pushed > 1e-9 * std::max(1.0, total) ? LpStatus::kInfeasible : LpStatus::kOptimal;
      if (sol.status == LpStatus::kInfeasible) return sol;
      break;
    case MinCostFlow::Result::kFailed:
      sol.status = LpStatus::kNumericalFailure;
      return sol;
  }

  // Split the aggregate flow into per-source paths.
  std::vector<double> arc_rem(p.arcs.size());
  for (std::size_t a = 0; a < p.arcs.size(); ++a) arc_rem[a] = std::max(0.0, mcf.flow_on(arc_edge[a]));
  std::vector<double> node_rem(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (node_edge[v] >= 0) node_rem[v] = std::max(0.0, mcf.flow_on(node_edge[v]));
  }
  std::vector<std::vector<int>> out_arcs(n);
  for (std::size_t a = 0; a < p.arcs.size(); ++a) out_arcs[static_cast<std::size_t>(p.arcs[a].tail)].push_back(static_cast<int>(a));

  const double dust = 1e-14 * std::max(1.0, total);
  for (std::size_t m = 0; m < num_tasks; ++m) {
    double supply = std::max(0.0, mcf.flow_on(task_edge[m]));
    std::vector<int> path;
    for (int guard = 0; supply > dust && guard < 100'000; ++guard) {
      path.clear();
      NodeId cur = p.tasks[m].source;
      double amount = supply;
      for (std::size_t steps = 0; node_rem[static_cast<std::size_t>(cur)] <= dust && steps <= n; ++steps) {
        int best = -1;
        for (int a : out_arcs[static_cast<std::size_t>(cur)]) {
          if (arc_rem[static_cast<std::size_t>(a)] > dust &&
              (best < 0 || arc_rem[static_cast<std::size_t>(a)] > arc_rem[static_cast<std::size_t>(best)])) {
            best = a;
          }
        }
        if (best < 0) break;
        path.push_back(best);
        amount = std::min(amount, arc_rem[static_cast<std::size_t>(best)]);
        cur = p.arcs[static_cast<std::size_t>(best)].head;
      }
      if (node_rem[static_cast<std::size_t>(cur)] <= dust) break;  // numerical residue only
      amount = std::min(amount, node_rem[static_cast<std::size_t>(cur)]);
      for (int a : path) {
        arc_rem[static_cast<std::size_t>(a)] -= amount;
        sol.arc_flow[m][static_cast<std::size_t>(a)] += amount;
      }
      node_rem[static_cast<std::size_t>(cur)] -= amount;
      sol.node_flow[m][static_cast<std::size_t>(cur)] += amount;
      supply -= amount;
    }
  }

  sol.status = LpStatus::kOptimal;
  for (std::size_t m = 0; m < num_tasks; ++m) {
    double delta = 0.0;
    for (std::size_t a = 0; a < p.arcs.size(); ++a) delta += sol.arc_flow[m][a] * p.arcs[a].cost;
    for (std::size_t v = 0; v < n; ++v) delta += sol.node_flow[m][v] * p.node_cost[v];
    sol.makespan[m] = delta;
    sol.objective += delta;
  }
  return sol;
}

double recompute_objective(const FlowProblem& p, const FlowSolution& s) {
  double obj = 0.0;
  for (std::size_t m = 0; m < s.arc_flow.size(); ++m) {
    for (std::size_t a = 0; a < p.arcs.size(); ++a) obj += s.arc_flow[m][a] * p.arcs[a].cost;
    for (std::size_t v = 0; v < p.num_nodes; ++v) obj += s.node_flow[m][v] * p.node_cost[v];
  }
  return obj;
}

double ResidualReport::max() const {
  return std::max({conservation, completeness, node_capacity, link_capacity, nonnegativity});
}

ResidualReport validate_solution(const FlowProblem& p, const FlowSolution& s, double tol) {
  ResidualReport r;
  const std::size_t n = p.num_nodes;
  if (s.arc_flow.size() != p.tasks.size() || s.node_flow.size() != p.tasks.size()) {
    throw std::invalid_argument("solution does not match the problem's task list");
  }
  auto note = [&](double& slot, double value, std::string id) {
    slot = std::max(slot, value);
    if (value > tol) r.violated.push_back(std::move(id));
  };

  std::vector<double> node_load(n, 0.0);
  std::vector<double> arc_load(p.arcs.size(), 0.0);
  for (std::size_t m = 0; m < p.tasks.size(); ++m) {
    const auto& f = s.arc_flow[m];
    const auto& g = s.node_flow[m];
    std::vector<double> balance(n, 0.0);
    balance[static_cast<std::size_t>(p.tasks[m].source)] += p.tasks[m].rate;
    for (std::size_t a = 0; a < p.arcs.size(); ++a) {
      balance[static_cast<std::size_t>(p.arcs[a].head)] += f[a];
      balance[static_cast<std::size_t>(p.arcs[a].tail)] -= f[a];
      arc_load[a] += f[a];
      note(r.nonnegativity, -f[a], fmt::format("nonneg:f[m={},arc={}]", m, a));
    }
    double processed = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      balance[v] -= g[v];
      processed += g[v];
      node_load[v] += g[v] * p.demand[v];
      note(r.nonnegativity, -g[v], fmt::format("nonneg:g[m={},v={}]", m, v));
      note(r.conservation, std::abs(balance[v]), fmt::format("conservation[m={},v={}]", m, v));
    }
    note(r.completeness, std::abs(p.tasks[m].rate - processed), fmt::format("completeness[m={}]", m));
  }
  for (std::size_t v = 0; v < n; ++v) {
    note(r.node_capacity, node_load[v] - p.node_capacity[v], fmt::format("node_capacity[v={}]", v));
  }
  for (std::size_t a = 0; a < p.arcs.size(); ++a) {
    note(r.link_capacity, arc_load[a] - p.arcs[a].capacity, fmt::format("link_capacity[arc={}]", a));
  }
  return r;
}

}  // namespace offload
