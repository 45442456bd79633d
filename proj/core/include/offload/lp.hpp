#pragma once

// Mean-field flow LP for joint offloading and routing:
//
//   min  sum_m delta_m,   delta_m = sum_e f_m(e) u(e) + sum_v g_m(v) u(v)
//   s.t. lambda_m 1(m = v) + sum_{i in N(v)} f_m(i,v) = g_m(v) + sum_{i in N(v)} f_m(v,i)
//        sum_v g_m(v) = lambda_m
//        sum_m g_m(v) h(v) <= psi(v)
//        sum_m f_m(e)      <= psi(e)
//        f, g >= 0
//
// Only single-type instances are supported. The benchmark constants are
// psi(v) = mu_v^0, psi(e) = r_e / max(d(e), 1) with d(e) the conflict degree,
// u = 1 / psi, h = 1.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offload/extended.hpp"
#include "offload/netgraph.hpp"
#include "offload/traffic.hpp"
#include "offload/types.hpp"

namespace offload {

struct FlowArc {
  NodeId tail;
  NodeId head;
  LinkId link;
  double capacity;  // psi(e)
  double cost;      // u(e)
};

struct FlowTask {
  NodeId source;
  double rate;  // lambda_m
};

struct FlowProblem {
  std::size_t num_nodes = 0;
  std::vector<FlowArc> arcs;  // indexed by arc_index(link, reverse)
  std::vector<FlowTask> tasks;
  std::vector<double> node_capacity;  // psi(v); 0 for nodes that cannot compute
  std::vector<double> node_cost;      // u(v); 0 where psi(v) = 0
  std::vector<double> demand;         // h(v)
};

enum class LpStatus { kOptimal, kInfeasible, kNumericalFailure };

std::string_view to_string(LpStatus status);

struct FlowSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<std::vector<double>> arc_flow;   // [task][arc]   f_m(e)
  std::vector<std::vector<double>> node_flow;  // [task][node]  g_m(v)
  std::vector<double> makespan;                // delta_m per task
  double objective = 0.0;
};

/// Throws std::invalid_argument("joint_lp requires single task type") on
/// multi-type input. Tasks sharing a source are merged.
FlowProblem build_lp(const Topology& topo, std::span<const TaskSpec> tasks, const ServiceRates& mu,
                     const ConflictGraph& cg);

/// Exact optimum. The LP decouples into one min-cost flow on the aggregate
/// (single sink per processing node), solved by successive shortest paths
/// and then split back per source by path decomposition.
FlowSolution solve_lp(const FlowProblem& p);

/// sum_e f u + sum_v g u, computed from the flow values alone.
double recompute_objective(const FlowProblem& p, const FlowSolution& s);

struct ResidualReport {
  double conservation = 0.0;   // flow balance
  double completeness = 0.0;   // all jobs processed
  double node_capacity = 0.0;
  double link_capacity = 0.0;
  double nonnegativity = 0.0;
  std::vector<std::string> violated;

  double max() const;
  bool ok(double tol = 1e-6) const { return max() <= tol; }
};

ResidualReport validate_solution(const FlowProblem& p, const FlowSolution& s, double tol = 1e-6);

}  // namespace offload
