#include "offload/compute.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace offload {

std::optional<TypeId> pick_commodity(std::span<const int> backlog, std::span<const double> mu) {
  if (backlog.size() != mu.size()) throw std::invalid_argument("backlog and rates differ in length");
  std::optional<TypeId> best;
  double best_ratio = 0.0;
  for (std::size_t c = 0; c < backlog.size(); ++c) {
    if (mu[c] <= 0.0 || backlog[c] <= 0) continue;
    const double ratio = backlog[c] / mu[c];
    if (!best || ratio > best_ratio) {
      best = static_cast<TypeId>(c);
      best_ratio = ratio;
    }
  }
  return best;
}

ComputeNode::ComputeNode(NodeId id, int processors, std::vector<double> mu)
    : id_(id), mu_(std::move(mu)), backlog_(mu_.size(), 0) {
  if (processors < 1) throw std::invalid_argument("a computing node needs at least one processor");
  slots_.resize(static_cast<std::size_t>(processors));
}

int ComputeNode::busy() const {
  return static_cast<int>(std::count_if(slots_.begin(), slots_.end(), [](const Slot& s) { return s.busy; }));
}

bool ComputeNode::fetch(Slot& slot, double at, QueueBank& queues) {
  for (std::size_t c = 0; c < mu_.size(); ++c) backlog_[c] = queues.size(id_, static_cast<int>(c));
  const auto type = pick_commodity(backlog_, mu_);
  if (!type) return false;
  const auto jobs = queues.dequeue_up_to(id_, *type, 1);
  slot = {true, jobs.front(), *type, at, at + duration(*type)};
  return true;
}

void ComputeNode::step(double now, double horizon, QueueBank& queues, std::vector<Completion>& completed) {
  if (now > horizon) throw std::invalid_argument("compute step with now > horizon");
  for (Slot& s : slots_) {
    if (!s.busy) fetch(s, now, queues);
  }
  for (;;) {
    Slot* next = nullptr;
    for (Slot& s : slots_) {
      if (s.busy && s.finish_time < horizon && (!next || s.finish_time < next->finish_time)) next = &s;
    }
    if (!next) break;
    completed.push_back({next->job, next->type, id_, next->fetch_time, next->finish_time});
    const double freed_at = next->finish_time;
    next->busy = false;
    fetch(*next, freed_at, queues);
  }
}

}  // namespace offload
