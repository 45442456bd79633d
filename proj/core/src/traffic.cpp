#include "offload/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace offload {

int task_count(double fraction, std::size_t num_clients) {
  // std::nearbyint follows the default FE_TONEAREST mode: ties go to even.
  return static_cast<int>(std::nearbyint(fraction * static_cast<double>(num_clients)));
}

std::vector<TaskSpec> generate_tasks(std::uint64_t seed, const Topology& topo, int num_types,
                                     double load, const TrafficParams& params) {
  if (!(load > 0.0)) throw std::invalid_argument(fmt::format("traffic load must be > 0, got {}", load));
  if (num_types < 1) throw std::invalid_argument("at least one task type is required");
  if (params.horizon < params.burst_length) {
    throw std::invalid_argument("horizon shorter than a burst");
  }

  const std::vector<NodeId> clients = topo.nodes_with_role(NodeRole::kClient);
  Rng rng = make_rng(seed, Stream::kTasks);
  std::uniform_real_distribution<double> fraction(params.client_fraction.lo, params.client_fraction.hi);
  std::uniform_real_distribution<double> base_rate(params.base_rate.lo, params.base_rate.hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> burst_start(0, std::max(0, params.horizon - params.burst_margin));

  std::vector<TaskSpec> tasks;
  for (TypeId c = 0; c < num_types; ++c) {
    const int n = std::min<int>(task_count(fraction(rng), clients.size()), static_cast<int>(clients.size()));
    std::vector<NodeId> chosen = clients;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(static_cast<std::size_t>(n));
    std::sort(chosen.begin(), chosen.end());
    for (NodeId m : chosen) {
      TaskSpec t;
      t.source = m;
      t.type = c;
      t.rate = load * base_rate(rng);
      const bool bursty = unit(rng) < params.bursty_prob;
      const int start = burst_start(rng);
      if (params.allow_bursty && bursty) t.burst = BurstWindow{start, start + params.burst_length};
      tasks.push_back(t);
    }
  }
  return tasks;
}

int sample_arrivals(const TaskSpec& task, int slot, Rng& rng) {
  if (!task.active(slot) || task.rate <= 0.0) return 0;
  return std::poisson_distribution<int>(task.rate)(rng);
}

ArrivalStream::ArrivalStream(std::uint64_t seed, const TaskSpec& task)
    : task_(task),
      rng_(make_rng(seed, Stream::kArrivals,
                    {static_cast<std::uint64_t>(task.type), static_cast<std::uint64_t>(task.source)})) {}

}  // namespace offload
