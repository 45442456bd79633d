#include "offload/queueing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <fmt/core.h>

namespace offload {

QueueState::QueueState(std::size_t num_nodes, std::size_t num_commodities, std::vector<int> lengths)
    : num_nodes_(num_nodes), num_commodities_(num_commodities), lengths_(std::move(lengths)) {
  if (lengths_.size() != num_nodes_ * num_commodities_) {
    throw std::invalid_argument("queue snapshot size mismatch");
  }
}

long long QueueState::total() const {
  return std::accumulate(lengths_.begin(), lengths_.end(), 0LL);
}

QueueBank::QueueBank(std::size_t num_nodes, std::size_t num_commodities)
    : num_nodes_(num_nodes), num_commodities_(num_commodities), queues_(num_nodes * num_commodities) {}

std::size_t QueueBank::index(NodeId node, int commodity) const {
  if (node < 0 || static_cast<std::size_t>(node) >= num_nodes_ || commodity < 0 ||
      static_cast<std::size_t>(commodity) >= num_commodities_) {
    throw std::out_of_range(fmt::format("no queue for node {} commodity {}", node, commodity));
  }
  return static_cast<std::size_t>(node) * num_commodities_ + static_cast<std::size_t>(commodity);
}

const std::deque<JobId>& QueueBank::queue(NodeId node, int commodity) const {
  return queues_[index(node, commodity)];
}

void QueueBank::enqueue(NodeId node, int commodity, JobId job) {
  queues_[index(node, commodity)].push_back(job);
  ++total_;
}

void QueueBank::enqueue(NodeId node, int commodity, std::span<const JobId> jobs) {
  auto& q = queues_[index(node, commodity)];
  q.insert(q.end(), jobs.begin(), jobs.end());
  total_ += static_cast<long long>(jobs.size());
}

std::vector<JobId> QueueBank::dequeue_up_to(NodeId node, int commodity, int n) {
  if (n < 0) throw std::invalid_argument("dequeue count must be >= 0");
  auto& q = queues_[index(node, commodity)];
  const auto take = std::min(static_cast<std::size_t>(n), q.size());
  std::vector<JobId> out(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(take));
  q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(take));
  total_ -= static_cast<long long>(take);
  return out;
}

QueueState QueueBank::snapshot() const {
  std::vector<int> lengths(queues_.size());
  std::transform(queues_.begin(), queues_.end(), lengths.begin(),
                 [](const std::deque<JobId>& q) { return static_cast<int>(q.size()); });
  return QueueState(num_nodes_, num_commodities_, std::move(lengths));
}

}  // namespace offload
