#include "offload/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <utility>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "offload/rng.hpp"

namespace offload {

std::string_view to_string(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::kJointSpbp:
      return "joint_spbp";
    case SchemeKind::kSpbpSpbp:
      return "spbp_spbp";
    case SchemeKind::kBpSpbp:
      return "bp_spbp";
    case SchemeKind::kJointLp:
      return "joint_lp";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  for (SchemeKind s : {SchemeKind::kJointSpbp, SchemeKind::kSpbpSpbp, SchemeKind::kBpSpbp, SchemeKind::kJointLp}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument(fmt::format("unknown scheme '{}'", name));
}

std::vector<int> realize_link_rates(std::uint64_t seed, int slot, const Topology& topo,
                                    const FadingParams& fading) {
  std::vector<int> rates(topo.num_links());
  Rng rng = make_rng(seed, Stream::kFading, {static_cast<std::uint64_t>(slot)});
  std::normal_distribution<double> normal(1.0, fading.sd > 0.0 ? fading.sd : 1.0);
  for (const Link& l : topo.links()) {
    double f = 1.0;
    if (fading.sd > 0.0) {
      f = normal(rng);
      for (int tries = 0; (f < fading.lo || f > fading.hi) && tries < 1000; ++tries) f = normal(rng);
      f = std::clamp(f, fading.lo, fading.hi);
    }
    rates[static_cast<std::size_t>(l.id)] = std::max(1, static_cast<int>(std::lround(l.rate * f)));
  }
  return rates;
}

void SimConfig::validate() const {
  if (horizon <= 0) throw std::invalid_argument("horizon must be > 0");
  if (!(load > 0.0)) throw std::invalid_argument("load must be > 0");
  if (processors < 1) throw std::invalid_argument("processor count must be >= 1");
  if (fading.sd < 0.0 || fading.lo > 1.0 || fading.hi < 1.0) {
    throw std::invalid_argument("fading bounds must bracket 1 and sd must be >= 0");
  }
}

struct Simulator::State {
  Instance inst;
  SimConfig cfg;
  ConflictGraph cg;
  std::optional<BiasTable> bias;
  BiasMatrix sink_bias;
  std::vector<ArrivalStream> streams;

  QueueBank compute_queues;  // per type; also the routing queues of joint_spbp
  std::optional<QueueBank> route_queues;  // separated schemes: per destination
  std::optional<QueueBank> hop_queues;    // joint_lp: per next hop
  std::optional<FixedDestinationRouting> fixed;
  std::optional<StaticPolicy> policy;
  Rng policy_rng;

  std::vector<ComputeNode> computers;
  std::vector<std::vector<NodeId>> candidates;  // [source * types + type]
  std::vector<Job> jobs;
  std::vector<long long> backlog;
  std::vector<Completion> completions;
  long long completed = 0;
  int slot = 0;

  std::ostream* schedule_trace = nullptr;
  std::ostream* completion_log = nullptr;

  State(Instance i, SimConfig c)
      : inst(std::move(i)), cfg(c), cg(build_conflict_graph(inst.topology)),
        compute_queues(inst.topology.num_nodes(), static_cast<std::size_t>(inst.num_types)),
        policy_rng(make_rng(c.seed, Stream::kPolicy)) {}

  const Topology& topo() const { return inst.topology; }
  bool can_process(NodeId v, TypeId c) const { return inst.mu(v, c) > 0.0; }

  long long queued() const {
    long long q = compute_queues.total();
    if (route_queues) q += route_queues->total();
    if (hop_queues) q += hop_queues->total();
    return q;
  }

  // Puts a job that sits at `node` (created or just received) into a queue.
  void place(Job& job, NodeId node) {
    switch (cfg.scheme) {
      case SchemeKind::kJointSpbp:
        compute_queues.enqueue(node, job.type, job.id);
        break;
      case SchemeKind::kSpbpSpbp:
      case SchemeKind::kBpSpbp:
        if (node == job.destination) {
          compute_queues.enqueue(node, job.type, job.id);
        } else {
          route_queues->enqueue(node, fixed->commodity_of(job.destination), job.id);
        }
        break;
      case SchemeKind::kJointLp: {
        const PolicyAction a =
            lp_policy_step(job.source, node, *policy, topo(), can_process(node, job.type), policy_rng);
        if (a.process) {
          compute_queues.enqueue(node, job.type, job.id);
        } else {
          hop_queues->enqueue(node, a.next_hop, job.id);
        }
        break;
      }
    }
  }

  void create_job(const TaskSpec& task) {
    Job job;
    job.id = static_cast<JobId>(jobs.size());
    job.type = task.type;
    job.source = task.source;
    job.arrival_slot = slot;
    const auto& cands =
        candidates[static_cast<std::size_t>(task.source) * static_cast<std::size_t>(inst.num_types) +
                   static_cast<std::size_t>(task.type)];
    if (cfg.scheme == SchemeKind::kSpbpSpbp) {
      job.destination = spbp_offload_destination(task.source, task.type, *bias, cands, compute_queues);
    } else if (cfg.scheme == SchemeKind::kBpSpbp) {
      job.destination = bp_offload_destination(task.source, task.type, cands, compute_queues);
    }
    jobs.push_back(job);
    place(jobs.back(), task.source);
  }

  void execute(const TransmitPlan& plan, QueueBank& from_bank) {
    struct Move {
      const Transmission* tx;
      std::vector<JobId> ids;
    };
    std::vector<Move> moves;
    moves.reserve(plan.size());
    for (const Transmission& tx : plan) {
      moves.push_back({&tx, from_bank.dequeue_up_to(tx.from, tx.commodity, tx.quota)});
    }
    for (const Move& m : moves) {
      if (schedule_trace) {
        fmt::print(*schedule_trace, "{},{},{},{},{},{},{}\n", slot, m.tx->link, m.tx->from, m.tx->to,
                   m.tx->commodity, m.tx->quota, m.ids.size());
      }
      for (JobId id : m.ids) {
        Job& job = jobs[static_cast<std::size_t>(id)];
        ++job.hops;
        place(job, m.tx->to);
      }
    }
  }

  void step() {
    const int t = slot;
    for (ArrivalStream& s : streams) {
      const int n = s.sample(t);
      for (int k = 0; k < n; ++k) create_job(s.task());
    }

    completions.clear();
    for (ComputeNode& node : computers) node.step(t, t + 1.0, compute_queues, completions);
    for (const Completion& c : completions) {
      Job& job = jobs[static_cast<std::size_t>(c.job)];
      job.completion_time = c.finish_time;
      job.fetch_time = c.fetch_time;
      job.processed_at = c.node;
      ++completed;
      if (completion_log) {
        fmt::print(*completion_log, "{},{},{},{}\n", c.job, c.node, c.fetch_time, c.finish_time);
      }
    }

    const std::vector<int> rates = realize_link_rates(cfg.seed, t, topo(), cfg.fading);
    switch (cfg.scheme) {
      case SchemeKind::kJointSpbp: {
        const QueueState qs = compute_queues.snapshot();
        execute(spbp_decide(topo(), cg, qs, sink_bias, rates).plan, compute_queues);
        break;
      }
      case SchemeKind::kSpbpSpbp:
      case SchemeKind::kBpSpbp: {
        const QueueState qs = route_queues->snapshot();
        execute(fixed->decide(topo(), cg, qs, rates).plan, *route_queues);
        break;
      }
      case SchemeKind::kJointLp: {
        const QueueState qs = hop_queues->snapshot();
        execute(next_hop_decide(topo(), cg, qs, rates).plan, *hop_queues);
        break;
      }
    }

    backlog.push_back(queued());
    ++slot;
  }
};

Simulator::Simulator(Instance instance, SimConfig config) {
  config.validate();
  s_ = std::make_unique<State>(std::move(instance), config);
  State& s = *s_;
  const Topology& topo = s.topo();
  const auto n = topo.num_nodes();
  const int types = s.inst.num_types;

  const double scale = config.load / s.inst.task_load;
  for (TaskSpec& t : s.inst.tasks) {
    t.rate *= scale;
    if (t.source < 0 || static_cast<std::size_t>(t.source) >= n || t.type < 0 || t.type >= types) {
      throw std::invalid_argument("task references an unknown node or type");
    }
  }

  const ExtendedGraph eg = build_extended_graph(topo, s.inst.mu, types);
  s.bias.emplace(compute_bias_table(eg));
  s.sink_bias = s.bias->sink_bias();

  for (const TaskSpec& t : s.inst.tasks) s.streams.emplace_back(config.seed, t);

  s.candidates.resize(n * static_cast<std::size_t>(types));
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    for (TypeId c = 0; c < types; ++c) {
      s.candidates[static_cast<std::size_t>(v) * static_cast<std::size_t>(types) + static_cast<std::size_t>(c)] =
          offload_candidates(topo, s.inst.mu, v, c);
    }
  }

  switch (config.scheme) {
    case SchemeKind::kJointSpbp:
      break;
    case SchemeKind::kSpbpSpbp:
    case SchemeKind::kBpSpbp: {
      std::vector<NodeId> servers = topo.nodes_with_role(NodeRole::kServer);
      s.fixed.emplace(*s.bias, servers);
      s.route_queues.emplace(n, servers.size());
      break;
    }
    case SchemeKind::kJointLp: {
      const FlowProblem p = build_lp(topo, s.inst.tasks, s.inst.mu, s.cg);
      const FlowSolution sol = solve_lp(p);
      if (sol.status == LpStatus::kInfeasible) {
        throw LpInfeasibleError(fmt::format("static LP infeasible at load {}", config.load));
      }
      if (sol.status != LpStatus::kOptimal) throw std::runtime_error("static LP solver failed");
      s.policy.emplace(p, sol);
      s.hop_queues.emplace(n, n);
      break;
    }
  }

  for (const Node& node : topo.nodes()) {
    const auto mu = s.inst.mu.of_node(node.id);
    if (std::any_of(mu.begin(), mu.end(), [](double r) { return r > 0.0; })) {
      s.computers.emplace_back(node.id, config.processors, std::vector<double>(mu.begin(), mu.end()));
    }
  }
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

void Simulator::step() {
  if (done()) throw std::logic_error("simulation horizon reached");
  s_->step();
}

int Simulator::slot() const { return s_->slot; }
bool Simulator::done() const { return s_->slot >= s_->cfg.horizon; }

SlotCounters Simulator::counters() const {
  SlotCounters c;
  c.created = static_cast<long long>(s_->jobs.size());
  c.completed = s_->completed;
  c.queued = s_->queued();
  for (const ComputeNode& node : s_->computers) c.processing += node.busy();
  return c;
}

const std::vector<Job>& Simulator::jobs() const { return s_->jobs; }
const std::vector<long long>& Simulator::backlog() const { return s_->backlog; }
void Simulator::set_schedule_trace(std::ostream* out) { s_->schedule_trace = out; }
void Simulator::set_completion_log(std::ostream* out) { s_->completion_log = out; }

RunResult Simulator::finish() {
  while (!done()) step();
  RunResult r;
  r.scheme = s_->cfg.scheme;
  r.load = s_->cfg.load;
  r.seed = s_->cfg.seed;
  r.jobs = s_->jobs;
  r.backlog = s_->backlog;
  r.completed = s_->completed;
  r.censored = static_cast<long long>(r.jobs.size()) - r.completed;
  return r;
}

RunResult run(const Instance& instance, const SimConfig& config) {
  try {
    Simulator sim(instance, config);
    return sim.finish();
  } catch (const LpInfeasibleError&) {
    RunResult r;
    r.scheme = config.scheme;
    r.load = config.load;
    r.seed = config.seed;
    r.lp_infeasible = true;
    return r;
  }
}

}  // namespace offload
